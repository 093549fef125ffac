#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "chatpc/errors.hpp"
#include "chatpc/llm_client.hpp"
#include "support/stub_server.hpp"

using namespace chatpc;
using chatpc_test::StubServer;

namespace {

const std::string kData = CHATPC_DATA_DIR;

Problem cancer() { return load_problem_file(kData + "/problems/cancer.json"); }

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

struct KeyGuard {
    KeyGuard() { setenv("CHATPC_API_KEY", "test-key", 1); }
    ~KeyGuard() { unsetenv("CHATPC_API_KEY"); }
};

}  // namespace

TEST_CASE("prompt instantiation for a conditional query") {
    const Problem p = cancer();
    const PromptBundle b = build_prompt(p, CiQuery("P", "D", {"C"}));
    REQUIRE(b.messages.size() == 3);
    CHECK(b.messages[0].role == "system");
    CHECK(b.messages[1].role == "user");
    CHECK(b.messages[2].role == "system");
    CHECK(b.messages[0].text.find("You are a helpful expert in medicine and epidemiology") == 0);
    CHECK(b.messages[1].text.find("is P conditionally independent of D conditioned on C?") !=
          std::string::npos);
    // One "name: description" line per involved variable.
    CHECK(b.messages[1].text.find("P: the patient has been exposed to high air pollution") !=
          std::string::npos);
    CHECK(b.messages[1].text.find("C: the patient suffers from lung cancer") != std::string::npos);
    CHECK(b.messages[1].text.find(p.context) != std::string::npos);
    CHECK(b.messages[2].text.find("P is not conditionally independent of D conditioned on C") !=
          std::string::npos);
    CHECK(b.messages[2].text.find("[NO (50%)]") != std::string::npos);
}

TEST_CASE("prompt drops every conditional clause for marginal queries") {
    const Problem p = cancer();
    const PromptBundle b = build_prompt(p, CiQuery("X", "D"));
    for (const auto& m : b.messages) CHECK(m.text.find("conditioned on") == std::string::npos);
    for (const auto& m : b.messages) CHECK(m.text.find("conditionally") == std::string::npos);
    CHECK(b.messages[1].text.find("is X independent of D?") != std::string::npos);
    CHECK(b.messages[2].text.find("\"X is independent of D\"") != std::string::npos);
    CHECK(b.messages[2].text.find("\"X is not independent of D\"") != std::string::npos);
}

TEST_CASE("prompt fingerprints are deterministic and direction-sensitive") {
    const Problem p = cancer();
    const CiQuery q("P", "D", {"C", "S"});
    CHECK(build_prompt(p, q).fingerprint == build_prompt(p, q).fingerprint);
    // Conditioning sets are canonicalized to sorted order.
    CHECK(build_prompt(p, CiQuery("P", "D", {"S", "C"})).fingerprint ==
          build_prompt(p, q).fingerprint);
    CHECK(build_prompt(p, q.swapped()).fingerprint != build_prompt(p, q).fingerprint);
    CHECK(prompt_fingerprint("other-problem", q) != prompt_fingerprint(p.id, q));
}

TEST_CASE("prompt rejects unknown variables") {
    CHECK_THROWS_AS(build_prompt(cancer(), CiQuery("P", "Q")), UnknownVariable);
}

TEST_CASE("response parsing maps the last bracketed token") {
    const RawAnswer a = parse_response(
        "The oil price shapes feed and transport costs, which feed into chicken prices.\n"
        "Therefore, the answer is [NO (75%)].");
    CHECK(a.verdict == Verdict::NO);
    CHECK(a.confidence == doctest::Approx(0.75));
    CHECK(a.raw_text.find("Therefore") != std::string::npos);

    CHECK(parse_response("[YES (100%)]").verdict == Verdict::YES);
    CHECK(parse_response("[YES (100%)]").confidence == doctest::Approx(1.0));

    const RawAnswer u = parse_response("I cannot answer this.");
    CHECK(u.verdict == Verdict::UNCERTAIN);
    CHECK_FALSE(u.confidence.has_value());

    // Chain-of-thought text may quote earlier candidate answers; the final
    // token wins.
    const RawAnswer last = parse_response("At first glance [NO (50%)], but on reflection the "
                                          "mechanism is absent. [YES (90%)]");
    CHECK(last.verdict == Verdict::YES);
    CHECK(last.confidence == doctest::Approx(0.9));
}

TEST_CASE("response parsing edge cases") {
    CHECK(parse_response("[no(12.5%)]").verdict == Verdict::NO);
    CHECK(parse_response("[no(12.5%)]").confidence == doctest::Approx(0.125));
    CHECK(parse_response("[ Yes ( 80 % ) ]").verdict == Verdict::YES);
    const RawAnswer bare = parse_response("[YES]");
    CHECK(bare.verdict == Verdict::YES);
    CHECK_FALSE(bare.confidence.has_value());
    CHECK(parse_response("[MAYBE (50%)]").verdict == Verdict::UNCERTAIN);
    CHECK(parse_response("").verdict == Verdict::UNCERTAIN);
    // Confidence above 100% clamps into [0, 1].
    CHECK(parse_response("[NO (150%)]").confidence == doctest::Approx(1.0));
}

TEST_CASE("cassette record and lookup round-trip through the file") {
    const std::string path = temp_path("chatpc_test_cassette.jsonl");
    std::remove(path.c_str());
    {
        CassetteStore store(path);
        CassetteEntry e;
        e.fingerprint = "fp1";
        e.query = CiQuery("A", "B", {"C"});
        e.model = "stub";
        e.completions = {"first [YES (80%)]", "second [NO (60%)]"};
        e.created_at = "2025-11-20T00:00:00Z";
        store.record(e);
        CHECK_FALSE(store.lookup("nope").has_value());
        auto hit = store.lookup("fp1");
        REQUIRE(hit.has_value());
        CHECK(hit->completions == e.completions);
        CHECK(hit->query == e.query);

        // Last write wins.
        e.completions = {"third [NO (70%)]"};
        store.record(e);
        CHECK(store.lookup("fp1")->completions.size() == 1);
    }
    // Reopen: the appended records persist, newest entry wins.
    CassetteStore reopened(path);
    CHECK(reopened.size() == 1);
    CHECK(reopened.lookup("fp1")->completions ==
          std::vector<std::string>{"third [NO (70%)]"});
    std::remove(path.c_str());
}

TEST_CASE("cassette rejects empty completion lists and corrupt files") {
    CassetteStore mem;
    CassetteEntry e;
    e.fingerprint = "fp";
    e.query = CiQuery("A", "B");
    CHECK_THROWS_AS(mem.record(e), StoreIoError);

    const std::string path = temp_path("chatpc_test_corrupt.jsonl");
    {
        std::ofstream out(path);
        out << "{ not json\n";
    }
    CHECK_THROWS_AS(CassetteStore{path}, StoreIoError);
    std::remove(path.c_str());
}

TEST_CASE("complete_batch returns n independent completions from the endpoint") {
    KeyGuard key;
    StubServer server(StubServer::constant("All fine. [NO (80%)]"));
    LlmConfig config;
    config.base_url = server.base_url();
    config.batch_size = 10;
    LlmClient client(config);
    const auto batch = client.complete_batch(build_prompt(cancer(), CiQuery("P", "D")));
    CHECK(batch.completions.size() == 10);
    CHECK_FALSE(batch.from_cassette);
    for (const auto& text : batch.completions) CHECK(text == "All fine. [NO (80%)]");
}

TEST_CASE("complete_batch tops up when the provider caps n per request") {
    KeyGuard key;
    StubServer server([](const nlohmann::json&, httplib::Response& res) {
        nlohmann::json choices = nlohmann::json::array();
        choices.push_back({{"message", {{"role", "assistant"}, {"content", "[YES (70%)]"}}}});
        res.set_content(nlohmann::json{{"choices", choices}}.dump(), "application/json");
    });
    LlmConfig config;
    config.base_url = server.base_url();
    config.batch_size = 4;
    LlmClient client(config);
    CHECK(client.complete_batch(build_prompt(cancer(), CiQuery("P", "D"))).completions.size() == 4);
    CHECK(server.requests() == 4);
}

TEST_CASE("an unreachable endpoint fails after the retry budget") {
    KeyGuard key;
    LlmConfig config;
    config.base_url = "http://127.0.0.1:9";  // nothing listens here
    config.max_retries = 2;
    config.timeout_seconds = 2;
    LlmClient client(config);
    try {
        client.complete_batch(build_prompt(cancer(), CiQuery("P", "D")));
        FAIL("expected TransportError");
    } catch (const TransportError& e) {
        CHECK(e.attempts == 3);
    }
}

TEST_CASE("auth failures surface immediately") {
    LlmConfig config;
    config.api_key_source = "CHATPC_TEST_NO_SUCH_KEY";
    LlmClient client(config);
    CHECK_THROWS_AS(client.complete_batch(build_prompt(cancer(), CiQuery("P", "D"))), AuthError);

    KeyGuard key;
    StubServer server([](const nlohmann::json&, httplib::Response& res) { res.status = 401; });
    LlmConfig cfg2;
    cfg2.base_url = server.base_url();
    LlmClient client2(cfg2);
    CHECK_THROWS_AS(client2.complete_batch(build_prompt(cancer(), CiQuery("P", "D"))), AuthError);
}

TEST_CASE("rate limiting carries retry-after metadata") {
    KeyGuard key;
    StubServer server([](const nlohmann::json&, httplib::Response& res) {
        res.status = 429;
        res.set_header("Retry-After", "7");
    });
    LlmConfig config;
    config.base_url = server.base_url();
    config.max_retries = 1;
    LlmClient client(config);
    try {
        client.complete_batch(build_prompt(cancer(), CiQuery("P", "D")));
        FAIL("expected RateLimited");
    } catch (const RateLimited& e) {
        CHECK(e.retry_after == doctest::Approx(7.0));
    }
}

TEST_CASE("malformed provider replies are rejected") {
    KeyGuard key;
    StubServer server([](const nlohmann::json&, httplib::Response& res) {
        res.set_content("{\"unexpected\": true}", "application/json");
    });
    LlmConfig config;
    config.base_url = server.base_url();
    LlmClient client(config);
    CHECK_THROWS_AS(client.complete_batch(build_prompt(cancer(), CiQuery("P", "D"))),
                    MalformedProviderReply);
}

TEST_CASE("cassette hits bypass the network and live batches are recorded first") {
    KeyGuard key;
    StubServer server(StubServer::constant("Reasoning. [YES (60%)]"));
    auto cassette = std::make_shared<CassetteStore>();
    LlmConfig config;
    config.base_url = server.base_url();
    config.batch_size = 3;
    LlmClient client(config, cassette);

    const PromptBundle prompt = build_prompt(cancer(), CiQuery("P", "S"));
    auto first = client.complete_batch(prompt);
    CHECK_FALSE(first.from_cassette);
    CHECK(server.requests() == 1);
    CHECK(cassette->lookup(prompt.fingerprint).has_value());

    auto second = client.complete_batch(prompt);
    CHECK(second.from_cassette);
    CHECK(second.completions == first.completions);
    CHECK(server.requests() == 1);  // no further network use
}

TEST_CASE("replay-only runs refuse cassette misses") {
    auto cassette = std::make_shared<CassetteStore>();
    LlmConfig config;
    config.base_url = "http://127.0.0.1:9";
    LlmClient client(config, cassette, /*replay_only=*/true);
    CHECK_THROWS_AS(client.complete_batch(build_prompt(cancer(), CiQuery("P", "D"))),
                    StoreIoError);
}

TEST_CASE("only completion texts are parsed, never the prompt's own example") {
    KeyGuard key;
    // Completions carry no bracketed verdict even though the prompt's format
    // instruction does; the pipeline must come back UNCERTAIN.
    StubServer server(StubServer::constant("There is no clean answer to this."));
    LlmConfig config;
    config.base_url = server.base_url();
    config.batch_size = 5;
    LlmClient client(config);
    const auto batch = client.complete_batch(build_prompt(cancer(), CiQuery("P", "D", {"C"})));
    for (const auto& text : batch.completions)
        CHECK(parse_response(text).verdict == Verdict::UNCERTAIN);
}
