#pragma once

#include <memory>
#include <string>
#include <vector>

#include "chatpc/cassette.hpp"
#include "chatpc/llm.hpp"

namespace chatpc {

/// Chat-completions transport with record/replay. A cassette hit short-circuits
/// the network entirely; live completions are recorded before being returned,
/// so a crash can lose at most in-flight batches.
class LlmClient {
public:
    explicit LlmClient(LlmConfig config, std::shared_ptr<CassetteStore> cassette = nullptr,
                       bool replay_only = false);

    struct BatchResult {
        std::vector<std::string> completions;
        bool from_cassette = false;
    };

    /// Exactly config.batch_size completions sampled independently at the
    /// configured temperature (or the recorded ones on a cassette hit).
    BatchResult complete_batch(const PromptBundle& prompt);

    const LlmConfig& config() const { return config_; }

private:
    std::vector<std::string> complete_live(const PromptBundle& prompt);

    LlmConfig config_;
    std::shared_ptr<CassetteStore> cassette_;
    bool replay_only_ = false;
};

}  // namespace chatpc
