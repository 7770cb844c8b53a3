#include "auctionab/cli.hpp"

int main(int argc, char** argv) { return auctionab::cli_main(argc, argv); }
