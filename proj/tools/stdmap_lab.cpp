#include "stdmap/cli/app.hpp"

int main(int argc, char** argv) { return stdmap::cli::parse_and_dispatch(argc, argv); }
