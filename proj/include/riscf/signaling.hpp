#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace riscf {

enum class MessageKind { kCsiDirect, kCsiCascade, kBroadcast, kActiveBeamformer, kCount };

inline const char* to_string(MessageKind k) {
  switch (k) {
    case MessageKind::kCsiDirect: return "csi_direct";
    case MessageKind::kCsiCascade: return "csi_cascade";
    case MessageKind::kBroadcast: return "broadcast_u_omega_theta";
    case MessageKind::kActiveBeamformer: return "active_beamformer";
    default: return "unknown";
  }
}

/// Endpoint of a fronthaul message: an AP index, the CPU, or every AP at once.
struct NodeId {
  int value = 0;

  static constexpr NodeId cpu() { return NodeId{-1}; }
  static constexpr NodeId all_aps() { return NodeId{-2}; }
  static constexpr NodeId ap(int b) { return NodeId{b}; }

  bool is_ap() const { return value >= 0; }
  std::string str() const {
    if (value == -1) return "cpu";
    if (value == -2) return "all_aps";
    return "ap" + std::to_string(value);
  }
  friend bool operator==(NodeId, NodeId) = default;
};

/// `symbols` is the true complex-scalar payload. `paper_symbols` follows the
/// closed-form overhead accounting, which counts each AP's CSI upload as N_t K
/// per kind (so 2 B N_t K in total) instead of the literal cascade size.
struct MessageRecord {
  NodeId from;
  NodeId to;
  MessageKind kind;
  std::int64_t symbols = 0;
  std::int64_t paper_symbols = 0;
  int iteration = 0;  // 0 for setup
};

class SignalingLedger {
 public:
  void record(const MessageRecord& m) { messages_.push_back(m); }

  const std::vector<MessageRecord>& messages() const { return messages_; }

  std::int64_t total_symbols() const {
    std::int64_t t = 0;
    for (const auto& m : messages_) t += m.symbols;
    return t;
  }
  std::int64_t total_paper_symbols() const {
    std::int64_t t = 0;
    for (const auto& m : messages_) t += m.paper_symbols;
    return t;
  }
  std::int64_t symbols_for(MessageKind k) const {
    std::int64_t t = 0;
    for (const auto& m : messages_)
      if (m.kind == k) t += m.symbols;
    return t;
  }
  std::int64_t paper_symbols_for_iteration(int iteration) const {
    std::int64_t t = 0;
    for (const auto& m : messages_)
      if (m.iteration == iteration) t += m.paper_symbols;
    return t;
  }
  std::int64_t symbols_for_iteration(int iteration) const {
    std::int64_t t = 0;
    for (const auto& m : messages_)
      if (m.iteration == iteration) t += m.symbols;
    return t;
  }
  /// Actual symbols per kind, in MessageKind order.
  std::array<std::int64_t, static_cast<std::size_t>(MessageKind::kCount)> totals_by_kind() const {
    std::array<std::int64_t, static_cast<std::size_t>(MessageKind::kCount)> t{};
    for (const auto& m : messages_) t[static_cast<std::size_t>(m.kind)] += m.symbols;
    return t;
  }
  std::map<int, std::int64_t> paper_totals_by_iteration() const {
    std::map<int, std::int64_t> t;
    for (const auto& m : messages_) t[m.iteration] += m.paper_symbols;
    return t;
  }
  bool operator==(const SignalingLedger& o) const {
    if (messages_.size() != o.messages_.size()) return false;
    for (std::size_t i = 0; i < messages_.size(); ++i) {
      const auto& a = messages_[i];
      const auto& b = o.messages_[i];
      if (!(a.from == b.from && a.to == b.to && a.kind == b.kind && a.symbols == b.symbols &&
            a.paper_symbols == b.paper_symbols && a.iteration == b.iteration))
        return false;
    }
    return true;
  }

 private:
  std::vector<MessageRecord> messages_;
};

/// 2 B N_t K + I (M + 2K + B N_t K): total fronthaul symbols of the
/// partially distributed scheme.
inline std::int64_t signaling_formula(std::int64_t num_aps, std::int64_t antennas,
                                      std::int64_t users, std::int64_t ris_elements,
                                      std::int64_t iterations) {
  return 2 * num_aps * antennas * users +
         iterations * (ris_elements + 2 * users + num_aps * antennas * users);
}

/// B^2 (N_t K + I (N_t K + M + 2K)): the fully distributed ADMM comparison.
inline std::int64_t admm_formula(std::int64_t num_aps, std::int64_t antennas, std::int64_t users,
                                 std::int64_t ris_elements, std::int64_t iterations) {
  return num_aps * num_aps *
         (antennas * users + iterations * (antennas * users + ris_elements + 2 * users));
}

/// I (M^3.5 + B (N_t K)^3), order-of-magnitude operation count.
inline double complexity_estimate(double num_aps, double antennas, double users,
                                  double ris_elements, double iterations) {
  return iterations * (std::pow(ris_elements, 3.5) + num_aps * std::pow(antennas * users, 3.0));
}

}  // namespace riscf
