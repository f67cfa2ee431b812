#include <string>
#include <vector>

#include "rmt/cli.hpp"

int main(int argc, char** argv) {
    return rmt::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
