#pragma once

#include "antix/data/point_mass.hpp"
#include "antix/data/toy_corner.hpp"
#include "antix/nets/network.hpp"
#include "antix/rnd/rnd.hpp"
#include "antix/sac/agent.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace antix::experiments {

/// A (fusion kind, placement) pair written as "kind:placement", or just "kind".
struct Variant {
  nets::FusionKind fusion = nets::FusionKind::Concat;
  nets::Placement placement = nets::Placement::FirstLayer;
  std::string label() const;
  static Variant parse(const std::string& text);
  bool operator==(const Variant&) const = default;
};

/// Flat key = value settings. Every key has a default; unknown keys are
/// rejected on load and on set().
class ExperimentConfig {
 public:
  ExperimentConfig();

  static ExperimentConfig from_file(const std::filesystem::path& path);
  /// Applies "key = value" lines; '#' starts a comment.
  void merge_text(const std::string& text, const std::string& origin = "<text>");
  void set(const std::string& key, const std::string& value);
  /// "key=value" form used by --set.
  void set_assignment(const std::string& assignment);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& raw(const std::string& key) const;
  Scalar real(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  std::uint64_t seed() const;
  bool flag(const std::string& key) const;
  std::vector<Scalar> real_list(const std::string& key) const;
  std::vector<std::string> string_list(const std::string& key) const;
  std::vector<Variant> variant_list(const std::string& key) const;

  /// Checks every value parses and lies in range; throws ValidationError.
  void validate() const;
  /// Sorted "key = value" lines, loadable with merge_text.
  std::string echo() const;
  const std::map<std::string, std::string>& values() const { return values_; }

  // Typed views.
  sac::SacConfig sac() const;
  sac::BcConfig bc() const;
  rnd::PretrainConfig pretrain() const;
  nets::NetSpec rnd_spec(Index s_dim, Index a_dim, const Variant& v) const;
  Variant predictor() const;
  Variant prior() const;
  data::ToyCornerConfig toy() const;
  data::PointMassEnv env() const;
  data::Behavior behavior() const;

  static const std::vector<std::pair<std::string, std::string>>& defaults();

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace antix::experiments
