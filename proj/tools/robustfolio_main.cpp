// SPDX-License-Identifier: MIT
#include "robustfolio/cli.hpp"

int main(int argc, char** argv) { return robustfolio::cli_main(argc, argv); }
