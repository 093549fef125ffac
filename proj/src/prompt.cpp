#include <algorithm>
#include <regex>

#include "chatpc/errors.hpp"
#include "chatpc/llm.hpp"
#include "chatpc/util.hpp"

namespace chatpc {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::YES: return "YES";
        case Verdict::NO: return "NO";
        default: return "UNCERTAIN";
    }
}

std::string prompt_fingerprint(const std::string& problem_id, const CiQuery& q) {
    std::vector<std::string> zs = q.z;
    std::sort(zs.begin(), zs.end());
    std::uint64_t h = fnv1a64(kPromptTemplateVersion);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(problem_id, h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(q.x, h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(q.y, h);
    for (const auto& z : zs) {
        h = fnv1a64("\x1f", h);
        h = fnv1a64(z, h);
    }
    return to_hex(h);
}

PromptBundle build_prompt(const Problem& problem, const CiQuery& q) {
    for (const auto& name : q.z) problem.variable(name);  // throws UnknownVariable
    const Variable& vx = problem.variable(q.x);
    const Variable& vy = problem.variable(q.y);
    const bool marginal = q.z.empty();
    const std::string zlist = join(q.z, ", ");

    std::string persona = "You are a helpful expert in " + problem.field +
                          " willing to answer questions.\n"
                          "You will be asked to provide your estimate and confidence on "
                          "statistical independence between two variables";
    if (!marginal) persona += " (eventually conditioned on a set of variables)";
    persona +=
        ".\n"
        "Your answer should not be based on data or observations, but only on the available "
        "knowledge.\n"
        "Even when unsure or uncertain, provide a valid answer and uncertainty.\n"
        "Answer only in the required format.";

    std::string user = problem.context + "\nConsider the following variables:\n";
    user += vx.name + ": " + vx.description + "\n";
    user += vy.name + ": " + vy.description + "\n";
    for (const auto& name : q.z) {
        const Variable& vz = problem.variable(name);
        user += vz.name + ": " + vz.description + "\n";
    }
    if (marginal)
        user += "is " + q.x + " independent of " + q.y + "?";
    else
        user += "is " + q.x + " conditionally independent of " + q.y + " conditioned on " + zlist +
                "?";

    auto gloss = [&](bool negated) {
        std::string s = q.x + " is " + std::string(negated ? "not " : "");
        if (marginal)
            s += "independent of " + q.y;
        else
            s += "conditionally independent of " + q.y + " conditioned on " + zlist;
        return s;
    };
    std::string format =
        "After explaining your reasoning, provide the answer between brackets as YES/NO, with "
        "percentage uncertainty between parenthesis.\n"
        "Where YES stands for\n\"" +
        gloss(false) + "\"\nand NO stands for\n\"" + gloss(true) + "\".\nFor example [NO (50%)].";

    PromptBundle bundle;
    bundle.messages = {{"system", std::move(persona)},
                       {"user", std::move(user)},
                       {"system", std::move(format)}};
    bundle.fingerprint = prompt_fingerprint(problem.id, q);
    bundle.problem_id = problem.id;
    bundle.query = q;
    return bundle;
}

RawAnswer parse_response(const std::string& text) {
    static const std::regex token_re(
        R"(\[\s*([A-Za-z]+)\s*(?:\(\s*([0-9]+(?:\.[0-9]+)?)\s*%\s*\))?\s*\])",
        std::regex::icase);

    RawAnswer out;
    out.raw_text = text;

    std::smatch last;
    auto begin = std::sregex_iterator(text.begin(), text.end(), token_re);
    for (auto it = begin; it != std::sregex_iterator(); ++it) last = *it;
    if (last.empty()) return out;

    std::string verdict = last[1].str();
    std::transform(verdict.begin(), verdict.end(), verdict.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (verdict != "YES" && verdict != "NO") return out;  // UNCERTAIN

    out.verdict = verdict == "YES" ? Verdict::YES : Verdict::NO;
    if (last[2].matched) {
        double pct = std::stod(last[2].str());
        out.confidence = std::clamp(pct / 100.0, 0.0, 1.0);
    }
    return out;
}

}  // namespace chatpc
