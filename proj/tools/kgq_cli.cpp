#include "cli_app.hpp"

int main(int argc, char** argv) { return kgq::cli::dispatch(argc, argv); }
