#include <iostream>

#include "app.hpp"

int main(int argc, char** argv) { return qladder::cli::run_app(argc, argv, std::cerr); }
