#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "cpgait/trajectory.hpp"

namespace cpgait {

/// Ordered collection of gaits. Order is meaningful: it is the operator's
/// slot order (1 = first gait).
class GaitLibrary {
 public:
  GaitLibrary() = default;
  explicit GaitLibrary(std::vector<GaitDefinition> gaits);

  /// Adds or replaces a gait by name.
  void add(GaitDefinition gait);

  const GaitDefinition* find(const std::string& name) const;

  /// Throws CommandError for unknown names.
  const GaitDefinition& at(const std::string& name) const;

  bool contains(const std::string& name) const { return find(name) != nullptr; }
  bool empty() const { return gaits_.empty(); }
  std::size_t size() const { return gaits_.size(); }
  const std::vector<GaitDefinition>& gaits() const { return gaits_; }

  /// Throws ConfigError when empty, names repeat, or a value is non-finite.
  void validate() const;

 private:
  std::vector<GaitDefinition> gaits_;
};

/// Phase-offset tables in cycle fractions (leg order FL, FR, HL, HR).
namespace offsets {
inline constexpr Vec4 kTrot{0.0, 0.5, 0.5, 0.0};
inline constexpr Vec4 kBound{0.0, 0.0, 0.5, 0.5};
inline constexpr Vec4 kWalk{0.0, 0.5, 0.25, 0.75};
inline constexpr Vec4 kGallop{0.0, 0.25, 0.5, 0.75};
}  // namespace offsets

inline constexpr std::size_t kDefaultFitSamples = 64;

struct GaitRecipe {
  std::string name;
  StrideProfile profile;
  Vec4 offsets_cycles{};
  double nominal_hz = 1.0;
};

/// Recipes for trot, gallop, bound, walk, modified trot 1 and 2, in that order.
std::vector<GaitRecipe> default_gait_recipes();

struct FittedGait {
  GaitDefinition gait;
  double max_residual = 0.0;
};

/// Fits the recipe's reference path and copies the weights to every leg.
FittedGait fit_gait(const GaitRecipe& recipe, std::size_t samples = kDefaultFitSamples);

/// The shipped library, fitted on the fly from default_gait_recipes().
GaitLibrary default_gait_library();

/// Multi-document YAML, one document per gait:
///   name, nominal_frequency_hz, offsets (cycle fractions), weights_x/weights_y (4x6, m).
std::string dump_gait_library_yaml(const GaitLibrary& library);
GaitLibrary parse_gait_library_yaml(const std::string& text);
GaitLibrary load_gait_library(const std::filesystem::path& path);
void save_gait_library(const GaitLibrary& library, const std::filesystem::path& path);

}  // namespace cpgait
