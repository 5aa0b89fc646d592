#include <iostream>

#include "mtsim/cli.hpp"

int main(int argc, char** argv) { return mtsim::cli::dispatch(argc, argv, std::cout, std::cerr); }
