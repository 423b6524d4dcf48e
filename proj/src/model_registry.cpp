#include "peakshaver/model_registry.hpp"

#include "peakshaver/errors.hpp"

namespace peakshaver {

using namespace std::chrono;

std::string_view to_string(IssueTime t) { return t == IssueTime::Midnight ? "midnight" : "noon"; }

std::optional<IssueTime> issue_time_of(Timestamp ts) {
  const auto since_midnight = ts - floor<days>(ts);
  if (since_midnight == hours{0}) return IssueTime::Midnight;
  if (since_midnight == hours{12}) return IssueTime::Noon;
  return std::nullopt;
}

IssueTime latest_issue(Timestamp ts) { return hour_of_day(ts) < 12 ? IssueTime::Midnight : IssueTime::Noon; }

ModelRegistry ModelRegistry::uniform(const PvusaCoefficients& c) {
  ModelRegistry r;
  for (const ModelKey& k : kAllKeys) r.set(k, RegistryEntry{c, {}, {}, 0});
  return r;
}

const RegistryEntry* ModelRegistry::find(ModelKey key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

const RegistryEntry& ModelRegistry::at(ModelKey key) const {
  if (const auto* e = find(key)) return *e;
  throw DomainError("no PV model fitted for " + std::string(to_string(key.issue)) + "/" +
                    std::string(to_string(key.sky)));
}

nlohmann::json ModelRegistry::to_json() const {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& [key, e] : entries_) {
    models.push_back({{"issue_time", to_string(key.issue)},
                      {"class", to_string(key.sky)},
                      {"gamma", {e.coefficients.gamma1, e.coefficients.gamma2, e.coefficients.gamma3}},
                      {"fit_begin", format_timestamp(e.fit_begin)},
                      {"fit_end", format_timestamp(e.fit_end)},
                      {"samples", e.samples}});
  }
  return {{"kind", "pvusa-registry"}, {"models", models}};
}

ModelRegistry ModelRegistry::from_json(const nlohmann::json& doc) {
  ModelRegistry r;
  try {
    for (const auto& m : doc.at("models")) {
      ModelKey key;
      const auto issue = m.at("issue_time").get<std::string>();
      const auto sky = m.at("class").get<std::string>();
      if (issue != "midnight" && issue != "noon") throw DomainError("bad issue_time '" + issue + "'");
      if (sky != "clear" && sky != "cloudy") throw DomainError("bad class '" + sky + "'");
      key.issue = issue == "midnight" ? IssueTime::Midnight : IssueTime::Noon;
      key.sky = sky == "clear" ? SkyClass::Clear : SkyClass::Cloudy;
      const auto& g = m.at("gamma");
      RegistryEntry e;
      e.coefficients = {g.at(0).get<double>(), g.at(1).get<double>(), g.at(2).get<double>()};
      e.fit_begin = parse_timestamp(m.at("fit_begin").get<std::string>());
      e.fit_end = parse_timestamp(m.at("fit_end").get<std::string>());
      e.samples = m.at("samples").get<int>();
      r.set(key, e);
    }
  } catch (const nlohmann::json::exception& ex) {
    throw DomainError(std::string("model registry JSON: ") + ex.what());
  }
  return r;
}

RefitResult refit_models(std::span<const PvHistoryRecord> history, Timestamp now, const ModelRegistry& previous,
                         int window_days) {
  RefitResult result{previous, false, {}};
  if (!issue_time_of(now)) return result;
  result.ran = true;
  if (window_days < 1) throw DomainError("refit window must be at least one day");

  const Timestamp begin = now - days{window_days};
  bool reaches_back = false;
  for (const auto& r : history) {
    if (r.time <= begin) {
      reaches_back = true;
      break;
    }
  }
  if (!reaches_back) {
    result.warnings.push_back("refit at " + format_timestamp(now) + " skipped: history shorter than " +
                              std::to_string(window_days) + " days");
    return result;
  }

  for (const ModelKey& key : ModelRegistry::kAllKeys) {
    std::vector<PvSample> samples;
    for (const auto& r : history) {
      if (r.time < begin || r.time >= now || r.issue != key.issue || r.sky != key.sky) continue;
      samples.push_back({r.irradiance, r.temperature, r.pv});
    }
    const std::string label = std::string(to_string(key.issue)) + "/" + std::string(to_string(key.sky));
    try {
      const auto coeffs = fit_pvusa(samples);
      result.registry.set(key, RegistryEntry{coeffs, begin, now, static_cast<int>(samples.size())});
    } catch (const DomainError&) {
      result.warnings.push_back("refit of " + label + " skipped: " + std::to_string(samples.size()) + " samples");
    } catch (const FitError& e) {
      result.warnings.push_back("refit of " + label + " skipped: " + e.what());
    }
  }
  return result;
}

nlohmann::json mlp_to_json(const Mlp& model) {
  nlohmann::json layers = nlohmann::json::array();
  for (int l = 0; l < model.layers(); ++l) {
    const auto& w = model.weight(l);
    const auto& b = model.bias(l);
    layers.push_back({{"rows", w.rows()},
                      {"cols", w.cols()},
                      {"weights", std::vector<double>(w.data(), w.data() + w.size())},
                      {"biases", std::vector<double>(b.data(), b.data() + b.size())}});
  }
  return {{"kind", "mlp"}, {"widths", model.widths()}, {"dropout", model.dropout()}, {"layers", layers}};
}

Mlp mlp_from_json(const nlohmann::json& doc) {
  try {
    Mlp m(doc.at("widths").get<std::vector<int>>(), doc.at("dropout").get<std::vector<double>>(), 0);
    const auto& layers = doc.at("layers");
    if (static_cast<int>(layers.size()) != m.layers()) throw DomainError("MLP JSON: layer count mismatch");
    for (int l = 0; l < m.layers(); ++l) {
      const auto w = layers.at(l).at("weights").get<std::vector<double>>();
      const auto b = layers.at(l).at("biases").get<std::vector<double>>();
      if (w.size() != static_cast<std::size_t>(m.weight(l).size()) ||
          b.size() != static_cast<std::size_t>(m.bias(l).size())) {
        throw DomainError("MLP JSON: layer " + std::to_string(l) + " has the wrong size");
      }
      std::copy(w.begin(), w.end(), m.weight(l).data());
      std::copy(b.begin(), b.end(), m.bias(l).data());
    }
    return m;
  } catch (const nlohmann::json::exception& ex) {
    throw DomainError(std::string("MLP JSON: ") + ex.what());
  }
}

}  // namespace peakshaver
