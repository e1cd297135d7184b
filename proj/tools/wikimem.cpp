#include <iostream>

#include "wikimem/cli.hpp"
#include "wikimem/httplib_transport.hpp"

int main(int argc, char** argv) {
  return wikimem::run_cli(argc, argv, std::cout, std::cerr,
                          [] { return std::make_shared<wikimem::HttplibTransport>(); });
}
