#include "cpgait/gait_library.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "cpgait/cpg.hpp"

namespace cpgait {

GaitLibrary::GaitLibrary(std::vector<GaitDefinition> gaits) {
  for (auto& g : gaits) add(std::move(g));
}

void GaitLibrary::add(GaitDefinition gait) {
  auto it = std::find_if(gaits_.begin(), gaits_.end(),
                         [&](const GaitDefinition& g) { return g.name == gait.name; });
  if (it != gaits_.end()) {
    *it = std::move(gait);
  } else {
    gaits_.push_back(std::move(gait));
  }
}

const GaitDefinition* GaitLibrary::find(const std::string& name) const {
  for (const auto& g : gaits_) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

const GaitDefinition& GaitLibrary::at(const std::string& name) const {
  const GaitDefinition* g = find(name);
  if (g == nullptr) throw CommandError("unknown gait '" + name + "'");
  return *g;
}

void GaitLibrary::validate() const {
  if (gaits_.empty()) throw ConfigError("gait library is empty");
  std::set<std::string> seen;
  for (const auto& g : gaits_) {
    if (g.name.empty()) throw ConfigError("gait with empty name");
    if (!seen.insert(g.name).second) throw ConfigError("duplicate gait '" + g.name + "'");
    if (!std::isfinite(g.nominal_frequency) || g.nominal_frequency < 0.0) {
      throw ConfigError("gait '" + g.name + "': bad nominal frequency");
    }
    for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
      if (!(g.target_offsets[leg] >= 0.0 && g.target_offsets[leg] < kTwoPi)) {
        throw ConfigError("gait '" + g.name + "': offsets must lie in [0, 1) cycles");
      }
      for (std::size_t j = 0; j < kBasisSize; ++j) {
        if (!all_finite(g.weights_x[leg][j], g.weights_y[leg][j])) {
          throw ConfigError("gait '" + g.name + "': non-finite weight");
        }
      }
    }
  }
}

std::vector<GaitRecipe> default_gait_recipes() {
  const StrideProfile base{};  // stride 0.10, clearance 0.04, height 0.22
  StrideProfile walk = base;
  walk.stride = 0.08;
  StrideProfile trot1 = base;
  trot1.stride = 0.06;
  StrideProfile trot2 = base;
  trot2.clearance = 0.06;
  return {
      {"trot", base, offsets::kTrot, 1.0},
      {"gallop", base, offsets::kGallop, 1.0},
      {"bound", base, offsets::kBound, 1.0},
      {"walk", walk, offsets::kWalk, 0.5},
      {"modified_trot_1", trot1, offsets::kTrot, 1.0},
      {"modified_trot_2", trot2, offsets::kTrot, 1.0},
  };
}

FittedGait fit_gait(const GaitRecipe& recipe, std::size_t samples) {
  const auto pts = sample_reference_path(recipe.profile, samples);
  const FitResult fit = fit_weights(pts);
  FittedGait out;
  out.gait.name = recipe.name;
  for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
    out.gait.weights_x[leg] = fit.weights_x;
    out.gait.weights_y[leg] = fit.weights_y;
    out.gait.target_offsets[leg] = wrap_phase(recipe.offsets_cycles[leg] * kTwoPi);
  }
  out.gait.nominal_frequency = recipe.nominal_hz * kTwoPi;
  out.max_residual = fit.max_residual;
  return out;
}

GaitLibrary default_gait_library() {
  GaitLibrary lib;
  for (const auto& r : default_gait_recipes()) lib.add(fit_gait(r).gait);
  return lib;
}

namespace {

void emit_row(YAML::Emitter& out, const WeightRow& row) {
  out << YAML::Flow << YAML::BeginSeq;
  for (double w : row) out << w;
  out << YAML::EndSeq;
}

WeightMatrix read_matrix(const YAML::Node& node, const std::string& key, const std::string& gait) {
  const YAML::Node m = node[key];
  if (!m || !m.IsSequence() || m.size() != kNumLegs) {
    throw ConfigError("gait '" + gait + "': " + key + " must be a 4x6 matrix");
  }
  WeightMatrix out{};
  for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
    const YAML::Node row = m[leg];
    if (!row.IsSequence() || row.size() != kBasisSize) {
      throw ConfigError("gait '" + gait + "': " + key + " must be a 4x6 matrix");
    }
    for (std::size_t j = 0; j < kBasisSize; ++j) out[leg][j] = row[j].as<double>();
  }
  return out;
}

}  // namespace

std::string dump_gait_library_yaml(const GaitLibrary& library) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  for (const auto& g : library.gaits()) {
    out << YAML::BeginDoc << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << g.name;
    out << YAML::Key << "nominal_frequency_hz" << YAML::Value << g.nominal_frequency / kTwoPi;
    out << YAML::Key << "offsets" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (double o : g.target_offsets) out << o / kTwoPi;
    out << YAML::EndSeq;
    out << YAML::Key << "weights_x" << YAML::Value << YAML::BeginSeq;
    for (const auto& row : g.weights_x) emit_row(out, row);
    out << YAML::EndSeq;
    out << YAML::Key << "weights_y" << YAML::Value << YAML::BeginSeq;
    for (const auto& row : g.weights_y) emit_row(out, row);
    out << YAML::EndSeq;
    out << YAML::EndMap;
  }
  return std::string(out.c_str()) + "\n";
}

GaitLibrary parse_gait_library_yaml(const std::string& text) {
  std::vector<YAML::Node> docs;
  try {
    docs = YAML::LoadAll(text);
  } catch (const YAML::Exception& e) {
    throw ParseError("gait library: " + e.msg, static_cast<std::size_t>(std::max(e.mark.pos, 0)));
  }
  GaitLibrary lib;
  for (const auto& doc : docs) {
    if (!doc || doc.IsNull()) continue;
    try {
      GaitDefinition g;
      g.name = doc["name"].as<std::string>();
      g.nominal_frequency = doc["nominal_frequency_hz"].as<double>() * kTwoPi;
      const YAML::Node offs = doc["offsets"];
      if (!offs.IsSequence() || offs.size() != kNumLegs) {
        throw ConfigError("gait '" + g.name + "': offsets must have 4 entries");
      }
      for (std::size_t leg = 0; leg < kNumLegs; ++leg) {
        const double cycles = offs[leg].as<double>();
        if (!(cycles >= 0.0 && cycles < 1.0)) {
          throw ConfigError("gait '" + g.name + "': offsets must lie in [0, 1) cycles");
        }
        g.target_offsets[leg] = wrap_phase(cycles * kTwoPi);
      }
      g.weights_x = read_matrix(doc, "weights_x", g.name);
      g.weights_y = read_matrix(doc, "weights_y", g.name);
      if (lib.contains(g.name)) throw ConfigError("duplicate gait '" + g.name + "'");
      lib.add(std::move(g));
    } catch (const YAML::Exception& e) {
      throw ParseError("gait library: " + e.msg, static_cast<std::size_t>(std::max(e.mark.pos, 0)));
    }
  }
  lib.validate();
  return lib;
}

GaitLibrary load_gait_library(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open gait library " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_gait_library_yaml(ss.str());
}

void save_gait_library(const GaitLibrary& library, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write gait library " + path.string());
  out << "# Gait library: one YAML document per gait.\n"
      << "# offsets are cycle fractions per leg (FL, FR, HL, HR); weights are metres,\n"
      << "# one row of six monomial weights per leg.\n";
  out << dump_gait_library_yaml(library);
}

}  // namespace cpgait
