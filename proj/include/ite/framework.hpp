#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ite/core/error.hpp"
#include "ite/core/sample.hpp"

namespace ite {

enum class MeasureKind { Entropy, MutualInformation, Divergence, Association, CrossQuantity, DistributionKernel };

inline constexpr MeasureKind kAllKinds[] = {
    MeasureKind::Entropy,     MeasureKind::MutualInformation, MeasureKind::Divergence,
    MeasureKind::Association, MeasureKind::CrossQuantity,     MeasureKind::DistributionKernel};

/// Short name used on the command line and in reports.
constexpr std::string_view to_string(MeasureKind kind) noexcept {
  switch (kind) {
    case MeasureKind::Entropy: return "entropy";
    case MeasureKind::MutualInformation: return "mi";
    case MeasureKind::Divergence: return "divergence";
    case MeasureKind::Association: return "association";
    case MeasureKind::CrossQuantity: return "cross";
    case MeasureKind::DistributionKernel: return "kernel";
  }
  return "unknown";
}

inline std::optional<MeasureKind> parse_kind(std::string_view s) {
  for (MeasureKind k : kAllKinds)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

using ParamValue = std::variant<std::int64_t, double, std::string>;
using ParamMap = std::map<std::string, ParamValue, std::less<>>;

inline std::string format_param(const ParamValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&v)) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), *d);
    return std::string(buf, end);
  }
  return std::get<std::string>(v);
}

/// Number and shape of the Sample arguments an estimator takes.
enum class Arity {
  One,     // entropy, association on the joint sample
  Two,     // divergence, cross quantity, distribution kernel
  Blocks,  // mutual information over M >= 2 blocks
};

/// Fully resolved, immutable description of one estimator. Meta estimators
/// carry their member configurations.
class EstimatorConfig {
 public:
  MeasureKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  bool mult() const noexcept { return mult_; }
  const ParamMap& params() const noexcept { return params_; }
  const std::vector<EstimatorConfig>& members() const noexcept { return members_; }

  const ParamValue& param(std::string_view key) const {
    auto it = params_.find(key);
    ite::detail::require(it != params_.end(), ErrorCode::UnknownParameter,
                    name_ + " has no parameter '" + std::string(key) + "'");
    return it->second;
  }

  std::int64_t integer(std::string_view key) const {
    const auto& v = param(key);
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
    throw Error(ErrorCode::InvalidParameterValue, std::string(key) + " is not an integer");
  }

  double real(std::string_view key) const {
    const auto& v = param(key);
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    throw Error(ErrorCode::InvalidParameterValue, std::string(key) + " is not a number");
  }

  std::string text(std::string_view key) const { return format_param(param(key)); }

  std::uint64_t seed() const {
    return params_.contains("seed") ? static_cast<std::uint64_t>(integer("seed")) : 0;
  }

  /// Copy with one existing parameter replaced; used to inject per-call seeds.
  EstimatorConfig with_param(std::string_view key, ParamValue value) const {
    EstimatorConfig copy = *this;
    auto it = copy.params_.find(key);
    ite::detail::require(it != copy.params_.end(), ErrorCode::UnknownParameter,
                    name_ + " has no parameter '" + std::string(key) + "'");
    it->second = std::move(value);
    return copy;
  }

  EstimatorConfig with_seed(std::uint64_t seed) const {
    return params_.contains("seed") ? with_param("seed", static_cast<std::int64_t>(seed)) : *this;
  }

  const EstimatorConfig& member(std::size_t i = 0) const { return members_.at(i); }

 private:
  friend class Registry;
  MeasureKind kind_ = MeasureKind::Entropy;
  std::string name_;
  bool mult_ = true;
  ParamMap params_;
  std::vector<EstimatorConfig> members_;
};

/// Member slot of a meta estimator: the parameter holding the member's name
/// and the measure kind that member must have.
struct MemberSlot {
  std::string param;
  MeasureKind kind;
};

class Registry;

/// Estimator body; meta estimators dispatch their members through the registry.
using EstimateFn =
    std::function<double(const Registry&, const EstimatorConfig&, std::span<const Sample>)>;
using ValidateFn = std::function<void(const EstimatorConfig&)>;

struct EstimatorDescriptor {
  MeasureKind kind;
  std::string name;
  Arity arity;
  ParamMap defaults;
  std::vector<MemberSlot> members;
  bool uses_mult = false;  // true only when mult changes the returned value
  std::string summary;
  ValidateFn validate;
  EstimateFn run;

  bool is_meta() const noexcept { return !members.empty(); }
};

namespace detail {

inline ParamValue parse_param_text(const std::string& text, const ParamValue& like) {
  if (std::holds_alternative<std::int64_t>(like)) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc() && ptr == text.data() + text.size()) return v;
    throw Error(ErrorCode::InvalidParameterValue, "'" + text + "' is not an integer");
  }
  if (std::holds_alternative<double>(like)) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc() && ptr == text.data() + text.size()) return v;
    throw Error(ErrorCode::InvalidParameterValue, "'" + text + "' is not a number");
  }
  return text;
}

/// Converts an override to the type of the declared default. String-typed
/// parameters accept numbers as well (e.g. a bandwidth that defaults to
/// "median").
inline ParamValue coerce_param(const std::string& key, const ParamValue& value,
                               const ParamValue& like) {
  if (const auto* s = std::get_if<std::string>(&value)) {
    if (std::holds_alternative<std::string>(like)) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
      if (ec == std::errc() && ptr == s->data() + s->size() && !s->empty()) return v;
      return *s;
    }
    try {
      return parse_param_text(*s, like);
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidParameterValue, key + ": " + e.message());
    }
  }
  if (std::holds_alternative<std::int64_t>(like)) {
    if (const auto* d = std::get_if<double>(&value)) {
      if (std::floor(*d) == *d && std::abs(*d) < 9.0e15) return static_cast<std::int64_t>(*d);
      throw Error(ErrorCode::InvalidParameterValue, key + " must be an integer");
    }
    return value;
  }
  if (std::holds_alternative<double>(like)) {
    if (const auto* i = std::get_if<std::int64_t>(&value)) return static_cast<double>(*i);
    return value;
  }
  return value;
}

}  // namespace detail

/// Estimator registry: names are unique within a kind.
class Registry {
 public:
  void add(EstimatorDescriptor descriptor) {
    const auto key = std::make_pair(descriptor.kind, descriptor.name);
    ite::detail::require(!entries_.contains(key), ErrorCode::InvalidInput,
                    "duplicate estimator " + descriptor.name);
    entries_.emplace(key, std::move(descriptor));
  }

  const EstimatorDescriptor* find(MeasureKind kind, std::string_view name) const {
    auto it = entries_.find(std::make_pair(kind, std::string(name)));
    return it == entries_.end() ? nullptr : &it->second;
  }

  const EstimatorDescriptor& at(MeasureKind kind, std::string_view name) const {
    const auto* d = find(kind, name);
    ite::detail::require(d != nullptr, ErrorCode::UnknownEstimator,
                    "no " + std::string(to_string(kind)) + " estimator named '" +
                        std::string(name) + "'");
    return *d;
  }

  /// Descriptors of one kind, sorted by name.
  std::vector<EstimatorDescriptor> list(MeasureKind kind) const {
    std::vector<EstimatorDescriptor> out;
    for (const auto& [key, d] : entries_)
      if (key.first == kind) out.push_back(d);
    return out;
  }

  std::vector<const EstimatorDescriptor*> all() const {
    std::vector<const EstimatorDescriptor*> out;
    for (const auto& [key, d] : entries_) out.push_back(&d);
    return out;
  }

  bool empty() const noexcept { return entries_.empty(); }

  /// Resolves defaults and overrides, recursively initializing members.
  /// Keys of the form "<slot>.<param>" are forwarded to the member in that
  /// slot, so `member=renyi_knn_k`, `member.alpha=0.8` reconfigures a meta
  /// estimator's member.
  EstimatorConfig build(MeasureKind kind, std::string_view name, bool mult,
                        const ParamMap& overrides) const {
    const EstimatorDescriptor& desc = at(kind, name);
    EstimatorConfig cfg;
    cfg.kind_ = kind;
    cfg.name_ = desc.name;
    cfg.mult_ = mult;
    cfg.params_ = desc.defaults;

    std::map<std::string, ParamMap> member_overrides;
    for (const auto& [key, value] : overrides) {
      if (auto dot = key.find('.'); dot != std::string::npos) {
        const std::string slot = key.substr(0, dot);
        const bool known = std::any_of(desc.members.begin(), desc.members.end(),
                                       [&](const MemberSlot& m) { return m.param == slot; });
        ite::detail::require(known, ErrorCode::UnknownParameter,
                        desc.name + " has no member slot '" + slot + "'");
        member_overrides[slot].emplace(key.substr(dot + 1), value);
        continue;
      }
      auto it = cfg.params_.find(key);
      ite::detail::require(it != cfg.params_.end(), ErrorCode::UnknownParameter,
                      desc.name + " has no parameter '" + key + "'");
      it->second = detail::coerce_param(key, value, it->second);
    }

    for (const MemberSlot& slot : desc.members) {
      const std::string member_name = cfg.text(slot.param);
      cfg.members_.push_back(build(slot.kind, member_name, mult, member_overrides[slot.param]));
    }
    if (desc.validate) desc.validate(cfg);
    return cfg;
  }

  /// Runs the estimator after checking the argument shape.
  double run(const EstimatorConfig& cfg, std::span<const Sample> args) const {
    const EstimatorDescriptor& desc = at(cfg.kind(), cfg.name());
    const std::size_t count = args.size();
    switch (desc.arity) {
      case Arity::One:
        ite::detail::require(count == 1, ErrorCode::ArityMismatch,
                        desc.name + " takes one sample, got " + std::to_string(count));
        break;
      case Arity::Two:
        ite::detail::require(count == 2, ErrorCode::ArityMismatch,
                        desc.name + " takes two samples, got " + std::to_string(count));
        break;
      case Arity::Blocks:
        ite::detail::require(count >= 2, ErrorCode::ArityMismatch,
                        desc.name + " takes at least two blocks, got " + std::to_string(count));
        break;
    }
    return desc.run(*this, cfg, args);
  }

 private:
  std::map<std::pair<MeasureKind, std::string>, EstimatorDescriptor> entries_;
};

}  // namespace ite
