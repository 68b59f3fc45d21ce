#pragma once

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include <vulca/vulca.hpp>

namespace testutil {

inline const vulca::LabelSet& default_labels() {
  static vulca::LabelSet labels =
      vulca::load_taxonomy(nlohmann::json::parse(vulca::kDefaultTaxonomyJson));
  return labels;
}

inline const std::vector<vulca::ProfileDef>& default_profiles() {
  static std::vector<vulca::ProfileDef> profiles = vulca::load_profiles(
      nlohmann::json::parse(vulca::kDefaultProfilesJson), default_labels());
  return profiles;
}

inline std::filesystem::path asset_path(const std::string& name) {
  return std::filesystem::path(VULCA_ASSET_DIR) / name;
}

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(VULCA_FIXTURE_DIR) / name;
}

// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("vulca_test_" + tag + "_" + std::to_string(std::random_device{}()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline vulca::FeatureVector47 make_vector(const std::array<double, vulca::kVectorDim>& v,
                                          const std::string& id = "doc") {
  return vulca::FeatureVector47(id, v);
}

inline vulca::FeatureVector47 random_vector(std::mt19937_64& rng,
                                            const std::string& id = "doc") {
  std::array<double, vulca::kVectorDim> v{};
  for (auto& x : v) {
    x = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  }
  return vulca::FeatureVector47(id, v);
}

}  // namespace testutil
