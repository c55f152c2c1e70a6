#include <iostream>
#include <string>
#include <vector>

#include "slpm/cli.hpp"

int main(int argc, char** argv)
{
  return slpm::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
