#include <iostream>

int main() {
    std::cerr << "bpbw: not yet wired up\n";
    return 2;
}
