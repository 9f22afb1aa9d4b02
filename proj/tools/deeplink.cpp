#include "deeplink/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return deeplink::run_cli(argc, argv, std::cout, std::cerr); }
