#pragma once

#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "peakshaver/core_types.hpp"
#include "peakshaver/mlp.hpp"
#include "peakshaver/pvusa.hpp"
#include "peakshaver/sky_class.hpp"

namespace peakshaver {

/// Forecasts are issued twice a day.
enum class IssueTime { Midnight, Noon };

std::string_view to_string(IssueTime t);
/// Midnight for 00:00:00 UTC, Noon for 12:00:00 UTC, nullopt otherwise.
std::optional<IssueTime> issue_time_of(Timestamp ts);
/// Most recent issue time at or before `ts`.
IssueTime latest_issue(Timestamp ts);

struct ModelKey {
  IssueTime issue = IssueTime::Midnight;
  SkyClass sky = SkyClass::Clear;
  auto operator<=>(const ModelKey&) const = default;
};

struct RegistryEntry {
  PvusaCoefficients coefficients;
  Timestamp fit_begin{};
  Timestamp fit_end{};
  int samples = 0;
  friend bool operator==(const RegistryEntry&, const RegistryEntry&) = default;
};

/// PV models keyed by (issue time, sky class).
class ModelRegistry {
 public:
  static constexpr ModelKey kAllKeys[4] = {{IssueTime::Midnight, SkyClass::Clear},
                                           {IssueTime::Midnight, SkyClass::Cloudy},
                                           {IssueTime::Noon, SkyClass::Clear},
                                           {IssueTime::Noon, SkyClass::Cloudy}};

  /// Every key set to the same coefficients.
  static ModelRegistry uniform(const PvusaCoefficients& c);

  bool complete() const { return entries_.size() == 4; }
  const RegistryEntry* find(ModelKey key) const;
  /// Throws DomainError when the key has never been fitted.
  const RegistryEntry& at(ModelKey key) const;
  void set(ModelKey key, RegistryEntry entry) { entries_[key] = entry; }
  const std::map<ModelKey, RegistryEntry>& entries() const { return entries_; }

  nlohmann::json to_json() const;
  static ModelRegistry from_json(const nlohmann::json& doc);

  friend bool operator==(const ModelRegistry&, const ModelRegistry&) = default;

 private:
  std::map<ModelKey, RegistryEntry> entries_;
};

/// One hour of a historical forecast paired with the realized PV output.
struct PvHistoryRecord {
  Timestamp time{};
  IssueTime issue = IssueTime::Midnight;
  SkyClass sky = SkyClass::Clear;
  double irradiance = 0.0;
  double temperature = 0.0;
  double pv = 0.0;
};

struct RefitResult {
  ModelRegistry registry;
  bool ran = false;  // false when `now` is not an issue time
  std::vector<std::string> warnings;
};

/// At issue times, refits each of the four models on records in [now - window_days, now).
/// Keys that cannot be fitted keep their previous entry and add a warning; so does the
/// whole registry when the history does not reach back window_days.
RefitResult refit_models(std::span<const PvHistoryRecord> history, Timestamp now, const ModelRegistry& previous,
                         int window_days = 10);

nlohmann::json mlp_to_json(const Mlp& model);
Mlp mlp_from_json(const nlohmann::json& doc);

}  // namespace peakshaver
