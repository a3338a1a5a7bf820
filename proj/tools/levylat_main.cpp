#include <levylat/cli.hpp>

int main(int argc, char** argv) { return levylat::cli_dispatch(argc, argv); }
