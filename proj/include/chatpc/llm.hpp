#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chatpc/problem.hpp"

namespace chatpc {

/// Tag folded into prompt fingerprints; bump on any template edit so stale
/// cassette entries stop matching instead of silently replaying.
inline constexpr const char* kPromptTemplateVersion = "v1";

struct ChatMessage {
    std::string role;  // "system" or "user"
    std::string text;
};

/// A fully instantiated prompt: exactly three messages (system, user, system)
/// plus a stable fingerprint of (problem id, canonicalized query, template
/// version).
struct PromptBundle {
    std::vector<ChatMessage> messages;
    std::string fingerprint;
    // Carried along so transports can persist what produced a completion.
    std::string problem_id;
    CiQuery query{"x", "y"};
};

enum class Verdict { YES, NO, UNCERTAIN };

const char* to_string(Verdict v);

struct RawAnswer {
    Verdict verdict = Verdict::UNCERTAIN;
    std::optional<double> confidence;  // present only when a percentage parsed
    std::string raw_text;
};

struct LlmConfig {
    std::string base_url = "https://api.openai.com/v1";
    std::string model = "gpt-4";
    double temperature = 1.0;
    int batch_size = 10;          // n independent draws per direction
    double timeout_seconds = 60.0;
    int max_retries = 2;
    std::string api_key_source = "CHATPC_API_KEY";  // environment variable name
};

/// Instantiates the query prompt. With an empty conditioning set every
/// "conditioned on ..." clause and the conditional phrasing are dropped,
/// giving the marginal form "is x independent of y?".
PromptBundle build_prompt(const Problem& problem, const CiQuery& q);

std::string prompt_fingerprint(const std::string& problem_id, const CiQuery& q);

/// Total function: maps the last bracketed "[VERDICT (P%)]" token to YES/NO
/// with confidence P/100; anything else (including no token at all) comes back
/// UNCERTAIN with absent confidence. The raw text is always preserved.
RawAnswer parse_response(const std::string& text);

}  // namespace chatpc
