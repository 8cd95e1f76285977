#include <string>
#include <vector>

#include "evac/harness.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return evac::cli_main(args);
}
