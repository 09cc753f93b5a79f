// Fits the shipped gait recipes and writes the gait library.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "cpgait/gait_library.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fit the default gait library"};
  std::string out = "config/gaits.yaml";
  std::size_t samples = cpgait::kDefaultFitSamples;
  app.add_option("-o,--output", out, "Output YAML path");
  app.add_option("--samples", samples, "Reference samples per cycle")->check(CLI::Range(6, 100000));
  CLI11_PARSE(app, argc, argv);

  try {
    cpgait::GaitLibrary library;
    for (const cpgait::GaitRecipe& recipe : cpgait::default_gait_recipes()) {
      const cpgait::FittedGait fitted = cpgait::fit_gait(recipe, samples);
      std::printf("%-16s max residual %.6f m\n", recipe.name.c_str(), fitted.max_residual);
      library.add(fitted.gait);
    }
    cpgait::save_gait_library(library, out);
    std::cout << "wrote " << out << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
