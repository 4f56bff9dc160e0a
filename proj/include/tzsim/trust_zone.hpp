#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "tzsim/backhaul.hpp"
#include "tzsim/types.hpp"

namespace tzsim {

enum class TzMode : std::uint8_t { CentralSecurity, LocalSecurity, HandbackInProgress };

constexpr std::string_view to_string(TzMode m) noexcept {
    switch (m) {
        case TzMode::CentralSecurity: return "central";
        case TzMode::LocalSecurity: return "local";
        case TzMode::HandbackInProgress: return "handback";
    }
    return "?";
}

enum class AuditOp : std::uint8_t {
    LocalAuthSuccess,
    LocalAuthDenied,
    EmergencyAccessGranted,
    HandbackReauth,
};

constexpr std::string_view to_string(AuditOp op) noexcept {
    switch (op) {
        case AuditOp::LocalAuthSuccess: return "LocalAuthSuccess";
        case AuditOp::LocalAuthDenied: return "LocalAuthDenied";
        case AuditOp::EmergencyAccessGranted: return "EmergencyAccessGranted";
        case AuditOp::HandbackReauth: return "HandbackReauth";
    }
    return "?";
}

struct AuditRecord {
    std::uint64_t step = 0;
    std::uint64_t ue = 0;
    AuditOp op = AuditOp::LocalAuthSuccess;
    std::string detail;
    std::uint64_t seq = 0;  // strict order within a step
};

enum class AuthOutcome : std::uint8_t {
    CentrallyAuthenticated,
    TemporarilyTrusted,
    EmergencyOnly,
    Deferred,  // queued for hand-back re-authentication; retry later
};

struct TrustZoneConfig {
    // Backhaul states that push the zone into local security mode. The
    // disconnected state always triggers regardless of this set.
    std::set<int> trigger_states = {4, 5, 9};
};

struct HandbackResult {
    std::size_t reauthenticated = 0;
    bool completed = false;
    std::vector<AuditRecord> flushed_audit;  // non-empty only when completed
};

/// The Trust Zone: operating-mode switching on backhaul reports, local
/// authentication against the synced-profile set, asymmetric trust transfer
/// and ordered hand-back, with append-only audit of all local operations.
class TrustZone {
  public:
    explicit TrustZone(TrustZoneConfig config = {}) : config_(std::move(config)) {}

    TzMode mode() const { return mode_; }
    bool laa_active() const { return mode_ != TzMode::CentralSecurity; }

    TrustStatus status_of(std::uint64_t ue) const {
        auto it = ledger_.find(ue);
        return it == ledger_.end() ? TrustStatus::Unauthenticated : it->second.status;
    }

    std::size_t handback_pending() const { return queue_.size(); }

    const std::unordered_map<std::uint64_t, TrustStatus> ledger_snapshot() const {
        std::unordered_map<std::uint64_t, TrustStatus> snap;
        snap.reserve(ledger_.size());
        for (const auto& [ue, entry] : ledger_) snap.emplace(ue, entry.status);
        return snap;
    }

    void on_backhaul_report(int state, StateClass condition) {
        bool trigger = condition == StateClass::Disconnected ||
                       (condition == StateClass::Unhealthy && config_.trigger_states.contains(state));
        if (mode_ == TzMode::CentralSecurity && trigger) {
            mode_ = TzMode::LocalSecurity;
            // Asymmetric trust: everyone authenticated centrally before the
            // switch keeps seamless access.
            for (auto& [ue, entry] : ledger_)
                if (entry.status == TrustStatus::CentrallyAuthenticated) entry.pre_switch = true;
            return;
        }
        if (mode_ == TzMode::LocalSecurity && condition == StateClass::Healthy) {
            mode_ = TzMode::HandbackInProgress;
            std::vector<std::uint64_t> queued;
            for (const auto& [ue, entry] : ledger_)
                if (entry.status == TrustStatus::TemporarilyTrusted) queued.push_back(ue);
            std::sort(queued.begin(), queued.end(),
                      [this](std::uint64_t a, std::uint64_t b) {
                          const LedgerEntry& ea = ledger_.at(a);
                          const LedgerEntry& eb = ledger_.at(b);
                          return ea.auth_seq < eb.auth_seq;
                      });
            queue_.assign(queued.begin(), queued.end());
            if (queue_.empty()) finish_recovery_pending_ = true;
        }
    }

    AuthOutcome authenticate(std::uint64_t ue, bool synced, std::uint64_t step) {
        if (mode_ == TzMode::CentralSecurity) {
            LedgerEntry& entry = ledger_[ue];
            entry.status = TrustStatus::CentrallyAuthenticated;
            entry.pre_switch = false;
            return AuthOutcome::CentrallyAuthenticated;
        }
        if (mode_ == TzMode::HandbackInProgress &&
            std::find(queue_.begin(), queue_.end(), ue) != queue_.end())
            return AuthOutcome::Deferred;

        if (synced) {
            LedgerEntry& entry = ledger_[ue];
            entry.status = TrustStatus::TemporarilyTrusted;
            entry.auth_seq = seq_;
            append(step, ue, AuditOp::LocalAuthSuccess, "profile present in LSS");
            if (mode_ == TzMode::HandbackInProgress) queue_.push_back(ue);
            return AuthOutcome::TemporarilyTrusted;
        }
        ledger_[ue].status = TrustStatus::EmergencyOnly;
        append(step, ue, AuditOp::LocalAuthDenied, "profile not synced");
        append(step, ue, AuditOp::EmergencyAccessGranted, "");
        return AuthOutcome::EmergencyOnly;
    }

    /// Dequeues up to `batch` UEs in preplanned (auth time) order and
    /// re-authenticates them centrally. When the queue drains, the zone
    /// returns to central security and the audit buffer is flushed.
    HandbackResult complete_handback(std::size_t batch, std::uint64_t step) {
        if (mode_ != TzMode::HandbackInProgress)
            throw std::logic_error("complete_handback: not in hand-back mode");
        HandbackResult result;
        while (result.reauthenticated < batch && !queue_.empty()) {
            std::uint64_t ue = queue_.front();
            queue_.pop_front();
            LedgerEntry& entry = ledger_[ue];
            entry.status = TrustStatus::CentrallyAuthenticated;
            entry.pre_switch = false;
            append(step, ue, AuditOp::HandbackReauth, "");
            ++result.reauthenticated;
        }
        if (queue_.empty()) {
            mode_ = TzMode::CentralSecurity;
            finish_recovery_pending_ = false;
            result.completed = true;
            result.flushed_audit = std::move(audit_);
            audit_.clear();
        }
        return result;
    }

    /// Passive pull: the buffer is returned without draining it.
    std::span<const AuditRecord> audit_export() const { return audit_; }

    /// Drop a departed UE from the trust ledger and any pending hand-back.
    void forget(std::uint64_t ue) {
        ledger_.erase(ue);
        auto it = std::find(queue_.begin(), queue_.end(), ue);
        if (it != queue_.end()) queue_.erase(it);
    }

  private:
    struct LedgerEntry {
        TrustStatus status = TrustStatus::Unauthenticated;
        bool pre_switch = false;
        std::uint64_t auth_seq = 0;
    };

    void append(std::uint64_t step, std::uint64_t ue, AuditOp op, std::string detail) {
        audit_.push_back({step, ue, op, std::move(detail), seq_++});
    }

    TrustZoneConfig config_;
    TzMode mode_ = TzMode::CentralSecurity;
    std::unordered_map<std::uint64_t, LedgerEntry> ledger_;
    std::deque<std::uint64_t> queue_;
    std::vector<AuditRecord> audit_;
    std::uint64_t seq_ = 0;
    bool finish_recovery_pending_ = false;
};

}  // namespace tzsim
