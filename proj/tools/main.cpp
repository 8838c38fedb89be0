#include <string>
#include <vector>

#include "mulab/experiment.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return mulab::cli_main(args);
}
