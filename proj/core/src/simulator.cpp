#include "maat/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "maat/errors.hpp"
#include "maat/parallel.hpp"
#include "maat/rng.hpp"

namespace maat {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

std::string random_app_id(Rng& rng) {
  std::string id(40, '0');
  for (auto& c : id) c = kHexDigits[rng.below(16)];
  return id;
}

void check_probability(double value, const std::string& field) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ValidationError("sim config: " + field + " must be in [0, 1]");
  }
}

int interval_days(const std::vector<Date>& dates) {
  if (dates.size() < 2) return 14;
  std::vector<int> gaps;
  gaps.reserve(dates.size() - 1);
  for (std::size_t i = 1; i < dates.size(); ++i) {
    gaps.push_back(dates[i] - dates[i - 1]);
  }
  std::sort(gaps.begin(), gaps.end());
  return gaps[gaps.size() / 2];
}

// Per-app verdict history for one scanner: the underlying verdict evolves as
// a Markov flip chain seeded from tpr/fpr, re-drawn from the degraded rates
// at the version-swap snapshot; the observable entry applies per-snapshot
// exclusion and maturity suppression on top.
struct ScannerObservation {
  bool present = false;
  bool detected = false;
};

class AppGenerator {
 public:
  AppGenerator(const SimConfig& config, const AppSpec& spec,
               std::size_t app_index, int interval)
      : config_(config), spec_(spec), app_index_(app_index),
        interval_(interval) {}

  // Observations for every (snapshot, scanner) pair; absent snapshots are
  // marked not-present for all scanners.
  std::vector<std::vector<ScannerObservation>> run() const {
    const auto& dates = config_.snapshot_dates;
    std::vector<std::vector<ScannerObservation>> all(
        dates.size(),
        std::vector<ScannerObservation>(config_.scanners.size()));
    for (std::size_t s = 0; s < config_.scanners.size(); ++s) {
      const auto& profile = config_.scanners[s];
      bool state = false;
      bool initialized = false;
      for (std::size_t t = 0; t < dates.size(); ++t) {
        if (dates[t] < spec_.first_seen) continue;
        Rng rng(Rng::derive(config_.seed,
                            {0xAB5ull, app_index_, s, t}));
        const bool swapped =
            profile.version_swap &&
            static_cast<int>(t) >= profile.version_swap->snapshot_index;
        const double tpr =
            swapped ? profile.version_swap->degraded_tpr : profile.tpr;
        const double fpr =
            swapped ? profile.version_swap->degraded_fpr : profile.fpr;
        const double detect_rate =
            is_malicious(spec_.truth) ? tpr : fpr;

        const bool at_swap =
            profile.version_swap &&
            static_cast<int>(t) == profile.version_swap->snapshot_index;
        if (!initialized || at_swap) {
          state = rng.bernoulli(detect_rate);
          initialized = true;
        } else {
          if (rng.bernoulli(profile.flip_prob)) state = !state;
        }

        ScannerObservation& obs = all[t][s];
        obs.present = !rng.bernoulli(profile.exclusion_prob);
        bool detected = state;
        if (detected && rng.bernoulli(suppression(dates[t]))) {
          detected = false;
        }
        obs.detected = detected;
      }
    }
    return all;
  }

 private:
  double suppression(Date at) const {
    if (spec_.onset_lag <= 0 || spec_.q0 <= 0.0) return 0.0;
    const double age_days = static_cast<double>(at - spec_.first_seen);
    const double horizon =
        static_cast<double>(spec_.onset_lag) * static_cast<double>(interval_);
    const double remaining = 1.0 - age_days / horizon;
    return remaining > 0.0 ? spec_.q0 * remaining : 0.0;
  }

  const SimConfig& config_;
  const AppSpec& spec_;
  std::size_t app_index_;
  int interval_;
};

std::set<std::string> sample_vocab(Rng& rng,
                                   const std::vector<std::string>& vocab,
                                   bool favor_first_half, std::size_t draws) {
  std::set<std::string> result;
  if (vocab.empty()) return result;
  const std::size_t half = std::max<std::size_t>(1, vocab.size() / 2);
  for (std::size_t i = 0; i < draws; ++i) {
    const bool first_half = rng.bernoulli(0.7) == favor_first_half;
    std::size_t index;
    if (first_half) {
      index = rng.below(half);
    } else {
      index = half + rng.below(std::max<std::size_t>(1, vocab.size() - half));
      index = std::min(index, vocab.size() - 1);
    }
    result.insert(vocab[index]);
  }
  return result;
}

}  // namespace

void validate(const SimConfig& config) {
  if (config.n_apps < 1) {
    throw ValidationError("sim config: n_apps must be >= 1");
  }
  check_probability(config.malicious_fraction, "malicious_fraction");
  check_probability(config.q0, "q0");
  check_probability(config.fresh_fraction, "fresh_fraction");
  if (config.onset_lag < 0) {
    throw ValidationError("sim config: onset_lag must be >= 0");
  }
  if (config.mature_lookback_days < 0) {
    throw ValidationError("sim config: mature_lookback_days must be >= 0");
  }
  if (config.snapshot_dates.empty()) {
    throw ValidationError("sim config: snapshot_dates must be non-empty");
  }
  for (std::size_t i = 1; i < config.snapshot_dates.size(); ++i) {
    if (config.snapshot_dates[i] <= config.snapshot_dates[i - 1]) {
      throw ValidationError(
          "sim config: snapshot_dates must be strictly increasing");
    }
  }
  if (config.scanners.empty()) {
    throw ValidationError("sim config: scanners must be non-empty");
  }
  std::set<std::string> names;
  for (const auto& profile : config.scanners) {
    if (profile.name.empty()) {
      throw ValidationError("sim config: scanner name must be non-empty");
    }
    if (!names.insert(profile.name).second) {
      throw ValidationError("sim config: duplicate scanner name " +
                            profile.name);
    }
    check_probability(profile.tpr, profile.name + ".tpr");
    check_probability(profile.fpr, profile.name + ".fpr");
    check_probability(profile.flip_prob, profile.name + ".flip_prob");
    check_probability(profile.exclusion_prob,
                      profile.name + ".exclusion_prob");
    if (profile.version_swap) {
      check_probability(profile.version_swap->degraded_tpr,
                        profile.name + ".version_swap.degraded_tpr");
      check_probability(profile.version_swap->degraded_fpr,
                        profile.name + ".version_swap.degraded_fpr");
      if (profile.version_swap->snapshot_index < 0) {
        throw ValidationError("sim config: " + profile.name +
                              ".version_swap.snapshot_index must be >= 0");
      }
    }
  }
}

SimOutput generate_corpus(const SimConfig& config) {
  validate(config);
  const auto& dates = config.snapshot_dates;
  const int interval = interval_days(dates);
  const Date window_start = dates.front();
  const Date window_end = dates.back();
  const int onset_days = config.onset_lag * interval;
  const auto n_apps = static_cast<std::size_t>(config.n_apps);
  const auto n_malicious = static_cast<std::size_t>(
      std::llround(config.malicious_fraction * config.n_apps));

  // Plant app identities first so ids, births and vocab draws never depend
  // on scanner behavior.
  std::vector<AppSpec> specs(n_apps);
  std::vector<std::set<std::string>> permissions(n_apps);
  std::vector<std::set<std::string>> tags(n_apps);
  for (std::size_t i = 0; i < n_apps; ++i) {
    Rng rng(Rng::derive(config.seed, {0xA44ull, i}));
    AppSpec& spec = specs[i];
    spec.app_id = random_app_id(rng);
    spec.truth = i < n_malicious ? Label::Malicious : Label::Benign;
    spec.onset_lag = config.onset_lag;
    spec.q0 = config.q0;
    const bool fresh = rng.bernoulli(config.fresh_fraction);
    if (fresh) {
      const int span = (window_end - window_start) + onset_days;
      spec.first_seen = window_start.add_days(
          -onset_days + static_cast<std::int32_t>(rng.below(
                            static_cast<std::uint64_t>(span + 1))));
    } else {
      const int lo = std::max(config.mature_lookback_days, onset_days);
      const int span = lo - onset_days;
      spec.first_seen = window_start.add_days(
          -lo + static_cast<std::int32_t>(
                    rng.below(static_cast<std::uint64_t>(span + 1))));
    }
    const bool malicious = is_malicious(spec.truth);
    permissions[i] = sample_vocab(rng, config.permission_vocab, malicious,
                                  3 + rng.below(8));
    tags[i] = sample_vocab(rng, config.tag_vocab, malicious,
                           1 + rng.below(4));
  }

  std::vector<std::vector<std::vector<ScannerObservation>>> observations(
      n_apps);
  parallel_for(n_apps, [&](std::size_t i) {
    observations[i] =
        AppGenerator(config, specs[i], i, interval).run();
  });

  SimOutput output;
  output.corpus.snapshots.resize(dates.size());
  for (std::size_t t = 0; t < dates.size(); ++t) {
    Snapshot& snapshot = output.corpus.snapshots[t];
    snapshot.date = dates[t];
    for (std::size_t i = 0; i < n_apps; ++i) {
      if (dates[t] < specs[i].first_seen) continue;
      ScanReport report;
      report.app_id = specs[i].app_id;
      report.scan_date = dates[t];
      report.first_seen = specs[i].first_seen;
      std::int64_t seen = 0;
      for (std::size_t u = 0; u <= t; ++u) {
        if (dates[u] >= specs[i].first_seen) ++seen;
      }
      report.times_submitted = seen;
      report.permissions = permissions[i];
      report.tags = tags[i];
      for (std::size_t s = 0; s < config.scanners.size(); ++s) {
        const ScannerObservation& obs = observations[i][t][s];
        if (!obs.present) continue;
        ScannerResult result;
        result.detected = obs.detected;
        const auto& profile = config.scanners[s];
        if (profile.version_swap) {
          result.version =
              static_cast<int>(t) >= profile.version_swap->snapshot_index
                  ? "7.2"
                  : "3.6";
        }
        report.scans.emplace(profile.name, std::move(result));
      }
      report.total = static_cast<int>(report.scans.size());
      report.positives = 0;
      for (const auto& [name, result] : report.scans) {
        if (result.detected) ++report.positives;
      }
      snapshot.reports.emplace(report.app_id, std::move(report));
    }
  }

  for (const auto& spec : specs) {
    output.truth.labels.emplace(spec.app_id, spec.truth);
  }
  validate_corpus(output.corpus);
  return output;
}

SimConfig default_config(std::uint64_t seed) {
  SimConfig config;
  config.seed = seed;
  config.n_apps = 2000;
  config.malicious_fraction = 0.5;
  config.q0 = 0.8;
  config.onset_lag = 3;
  config.fresh_fraction = 0.30;
  config.mature_lookback_days = 1095;

  Date date = Date::from_ymd(2019, 7, 5);
  for (int i = 0; i < 10; ++i) {
    config.snapshot_dates.push_back(date);
    date = date.add_days(14);
  }

  auto two_digits = [](int i) {
    return (i < 10 ? "0" : "") + std::to_string(i);
  };

  for (int i = 0; i < 16; ++i) {
    ScannerProfile profile;
    profile.name = "av-anchor-" + two_digits(i);
    profile.tpr = 0.995 - 0.002 * i;
    profile.fpr = 0.001 + 0.0004 * i;
    profile.flip_prob = 0.001 + 0.0002 * i;
    profile.exclusion_prob = 0.002 + 0.0005 * i;
    config.scanners.push_back(std::move(profile));
  }
  for (int i = 0; i < 2; ++i) {
    ScannerProfile profile;
    profile.name = "av-flaky-" + two_digits(i);
    profile.tpr = 0.97;
    profile.fpr = 0.003;
    profile.flip_prob = 0.004;
    profile.exclusion_prob = 0.30;
    config.scanners.push_back(std::move(profile));
  }
  for (int i = 0; i < 2; ++i) {
    ScannerProfile profile;
    profile.name = "av-legacy-" + two_digits(i);
    profile.tpr = 0.90;
    profile.fpr = 0.005;
    profile.flip_prob = 0.004;
    profile.exclusion_prob = 0.010;
    profile.version_swap = VersionSwap{3, 0.05, 0.003};
    config.scanners.push_back(std::move(profile));
  }
  for (int i = 0; i < 40; ++i) {
    ScannerProfile profile;
    profile.name = "av-noise-" + two_digits(i);
    profile.tpr = i < 36 ? 0.20 + 0.001 * i : 0.25 + 0.05 * (i - 36);
    profile.fpr = 0.004 + 0.002 * (i % 8);
    profile.flip_prob = 0.007;
    profile.exclusion_prob = 0.003;
    config.scanners.push_back(std::move(profile));
  }

  config.permission_vocab = {
      "android.permission.SEND_SMS",
      "android.permission.RECEIVE_SMS",
      "android.permission.READ_SMS",
      "android.permission.READ_CONTACTS",
      "android.permission.READ_PHONE_STATE",
      "android.permission.PROCESS_OUTGOING_CALLS",
      "android.permission.RECEIVE_BOOT_COMPLETED",
      "android.permission.SYSTEM_ALERT_WINDOW",
      "android.permission.GET_TASKS",
      "android.permission.WRITE_SETTINGS",
      "android.permission.INSTALL_PACKAGES",
      "android.permission.REQUEST_INSTALL_PACKAGES",
      "android.permission.INTERNET",
      "android.permission.ACCESS_NETWORK_STATE",
      "android.permission.ACCESS_WIFI_STATE",
      "android.permission.ACCESS_FINE_LOCATION",
      "android.permission.ACCESS_COARSE_LOCATION",
      "android.permission.CAMERA",
      "android.permission.RECORD_AUDIO",
      "android.permission.READ_EXTERNAL_STORAGE",
      "android.permission.WRITE_EXTERNAL_STORAGE",
      "android.permission.BLUETOOTH",
      "android.permission.NFC",
      "android.permission.VIBRATE",
  };
  config.tag_vocab = {
      "sends-sms",      "checks-gps",     "contains-elf",
      "dynamic-dex",    "reflection",     "obfuscated",
      "native-code",    "checks-network", "uses-crypto",
      "long-sleeps",    "idle-heavy",     "multidex",
  };
  return config;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json profile_to_json(const ScannerProfile& profile) {
  ordered_json object;
  object["name"] = profile.name;
  object["tpr"] = profile.tpr;
  object["fpr"] = profile.fpr;
  object["flip_prob"] = profile.flip_prob;
  object["exclusion_prob"] = profile.exclusion_prob;
  if (profile.version_swap) {
    object["version_swap"] = {
        {"snapshot_index", profile.version_swap->snapshot_index},
        {"degraded_tpr", profile.version_swap->degraded_tpr},
        {"degraded_fpr", profile.version_swap->degraded_fpr}};
  }
  return object;
}

ScannerProfile profile_from_json(const ordered_json& object) {
  ScannerProfile profile;
  profile.name = object.at("name").get<std::string>();
  profile.tpr = object.at("tpr").get<double>();
  profile.fpr = object.at("fpr").get<double>();
  profile.flip_prob = object.at("flip_prob").get<double>();
  profile.exclusion_prob = object.at("exclusion_prob").get<double>();
  if (object.contains("version_swap")) {
    const auto& swap = object["version_swap"];
    profile.version_swap =
        VersionSwap{swap.at("snapshot_index").get<int>(),
                    swap.at("degraded_tpr").get<double>(),
                    swap.at("degraded_fpr").get<double>()};
  }
  return profile;
}

}  // namespace

SimConfig load_sim_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  ordered_json object;
  try {
    object = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  SimConfig config;
  config.seed = object.value("seed", std::uint64_t{0});
  config.n_apps = object.at("n_apps").get<int>();
  config.malicious_fraction = object.at("malicious_fraction").get<double>();
  for (const auto& date : object.at("snapshot_dates")) {
    config.snapshot_dates.push_back(Date::parse(date.get<std::string>()));
  }
  config.q0 = object.value("q0", 0.8);
  config.onset_lag = object.value("onset_lag", 3);
  config.fresh_fraction = object.value("fresh_fraction", 0.30);
  config.mature_lookback_days = object.value("mature_lookback_days", 1095);
  if (object.contains("permission_vocab")) {
    config.permission_vocab =
        object["permission_vocab"].get<std::vector<std::string>>();
  }
  if (object.contains("tag_vocab")) {
    config.tag_vocab = object["tag_vocab"].get<std::vector<std::string>>();
  }
  for (const auto& profile : object.at("scanners")) {
    config.scanners.push_back(profile_from_json(profile));
  }
  validate(config);
  return config;
}

void save_sim_config(const SimConfig& config,
                     const std::filesystem::path& path) {
  ordered_json object;
  object["seed"] = config.seed;
  object["n_apps"] = config.n_apps;
  object["malicious_fraction"] = config.malicious_fraction;
  auto dates = ordered_json::array();
  for (const Date date : config.snapshot_dates) {
    dates.push_back(date.to_string());
  }
  object["snapshot_dates"] = std::move(dates);
  object["q0"] = config.q0;
  object["onset_lag"] = config.onset_lag;
  object["fresh_fraction"] = config.fresh_fraction;
  object["mature_lookback_days"] = config.mature_lookback_days;
  object["permission_vocab"] = config.permission_vocab;
  object["tag_vocab"] = config.tag_vocab;
  auto scanners = ordered_json::array();
  for (const auto& profile : config.scanners) {
    scanners.push_back(profile_to_json(profile));
  }
  object["scanners"] = std::move(scanners);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << object.dump(2) << '\n';
}

}  // namespace maat
