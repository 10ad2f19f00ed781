#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>

namespace koca {

using NodeId = std::uint32_t;
using SimTime = double;

/// Raised when a SimConfig violates one of its invariants. `field()` names
/// the offending parameter so front ends can point at the right flag.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct IdealChannel {};

struct LossyChannel {
  double per = 0.0;
};

struct ContentionChannel {
  double per = 0.0;
  double jitterMax = 0.5;
};

using ChannelModel = std::variant<IdealChannel, LossyChannel, ContentionChannel>;

inline double packet_error_rate(const ChannelModel& channel) {
  return std::visit(
      [](const auto& c) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(c)>, IdealChannel>) {
          return 0.0;
        } else {
          return c.per;
        }
      },
      channel);
}

inline double jitter_max(const ChannelModel& channel) {
  if (const auto* c = std::get_if<ContentionChannel>(&channel)) return c->jitterMax;
  return 0.0;
}

inline std::string_view channel_name(const ChannelModel& channel) {
  switch (channel.index()) {
    case 0: return "ideal";
    case 1: return "lossy";
    default: return "contention";
  }
}

/// Parameters of one experiment. Exactly one of txRange / dTarget is set;
/// the other is derived from the average-degree relation.
struct SimConfig {
  std::size_t n = 100;
  double l = 100.0;
  std::optional<double> txRange;
  std::optional<double> dTarget;
  int k = 1;
  double p = 0.15;
  int o = 1;
  double tHop = 1.0;
  double delta = 1.0;
  double c = 2.0;
  ChannelModel channel = IdealChannel{};
  std::uint64_t seed = 0;
  std::size_t reps = 1;
  bool wrapArea = false;

  /// Time for a message to travel k hops.
  SimTime advertisement_span() const { return k * tHop; }
  SimTime ch_ad_wait() const { return advertisement_span() + delta; }
  SimTime jreq_wait() const { return c * advertisement_span() + delta; }
  // A late head starts after every node has bootstrapped, so no slack.
  SimTime late_jreq_wait() const { return c * advertisement_span(); }
  /// Worst-case completion time of the whole formation phase.
  SimTime termination_bound() const {
    return advertisement_span() + delta + late_jreq_wait();
  }
};

inline void validate(const SimConfig& cfg) {
  if (cfg.n < 1) throw ConfigError("n", "must be >= 1");
  if (!(cfg.l > 0.0) || !std::isfinite(cfg.l)) throw ConfigError("l", "must be > 0");
  if (cfg.txRange.has_value() == cfg.dTarget.has_value())
    throw ConfigError("tx-range", "exactly one of tx-range / d must be given");
  if (cfg.txRange && !(*cfg.txRange > 0.0)) throw ConfigError("tx-range", "must be > 0");
  if (cfg.dTarget && !(*cfg.dTarget > 0.0)) throw ConfigError("d", "must be > 0");
  if (cfg.k < 1) throw ConfigError("k", "must be >= 1");
  if (!(cfg.p > 0.0 && cfg.p <= 1.0)) throw ConfigError("p", "must lie in (0, 1]");
  if (cfg.o < 1) throw ConfigError("o", "must be >= 1");
  if (!(cfg.tHop > 0.0)) throw ConfigError("t-hop", "must be > 0");
  if (!(cfg.delta >= 0.0)) throw ConfigError("delta", "must be >= 0");
  if (!(cfg.c >= 2.0)) throw ConfigError("c", "must be >= 2");
  if (cfg.reps < 1) throw ConfigError("reps", "must be >= 1");
  const double per = packet_error_rate(cfg.channel);
  if (!(per >= 0.0 && per < 1.0)) throw ConfigError("per", "must lie in [0, 1)");
  if (!(jitter_max(cfg.channel) >= 0.0)) throw ConfigError("jitter-max", "must be >= 0");
}

}  // namespace koca
