// Writes a synthetic corpus (drawn shapes on textured backgrounds) for trying the pipeline.

#include <iostream>

#include "CLI11.hpp"
#include "rscm/fixture.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic fixture corpus writer"};
  std::string root;
  std::uint64_t seed = 1;
  rscm::FixtureOptions options;
  app.add_option("root", root, "Output corpus directory")->required();
  app.add_option("--seed", seed)->capture_default_str();
  app.add_option("--images", options.images)->capture_default_str();
  app.add_option("--objects", options.objects_per_image, "Eligible objects per image")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  try {
    const auto items = rscm::make_fixture_corpus(root, seed, options);
    std::cout << "wrote " << items.size() << " items to " << root << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
