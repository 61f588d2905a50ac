// Command-line front end. Subcommands are wired up as the library lands.
#include <iostream>

int main() {
    std::cout << "newton: no subcommands wired yet\n";
    return 2;
}
