// Regenerates the committed cassettes under data/cassettes from the vote
// counts hard-wired below. Run from the repository root:
//   ./build/gen-fixtures [data-dir]
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "chatpc/cassette.hpp"
#include "chatpc/llm.hpp"
#include "chatpc/problem.hpp"

using namespace chatpc;

namespace {

constexpr const char* kCreatedAt = "2025-11-20T00:00:00Z";

struct Counts {
    int no = 0;
    int yes = 0;
    int uncertain = 0;
};

std::string reasoning_text(const Problem& problem, const CiQuery& q, bool dependent, int idx) {
    static const char* dep_bodies[] = {
        "Both quantities sit in the same physical system described above, and knowledge of one "
        "plausibly constrains the other",
        "There is a known pathway through which the first quantity can influence the second, "
        "directly or through shared drivers",
        "The two variables respond to common large-scale conditions, so information about one "
        "carries over to the other",
        "Shared upstream factors connect these variables, and the stated conditioning does not "
        "sever every such route",
    };
    static const char* indep_bodies[] = {
        "No mechanism in the described system ties these two quantities together once the stated "
        "information is taken into account",
        "The quantities belong to unrelated processes, and general knowledge offers no pathway "
        "between them",
        "Any association between them would be coincidental; the described drivers do not link "
        "the two",
        "Knowing one of them adds nothing about the other given what is already stated",
    };
    static const int confidences[] = {90, 85, 80, 75, 70, 95};

    const char* body = dependent ? dep_bodies[idx % 4] : indep_bodies[idx % 4];
    const int conf = confidences[idx % 6];
    std::string head = "Considering " + q.x + " and " + q.y;
    if (!q.z.empty()) head += " given " + q.z.front();
    for (std::size_t i = 1; i < q.z.size(); ++i) head += ", " + q.z[i];
    (void)problem;
    return head + ": " + body + ". Therefore, the answer is [" +
           std::string(dependent ? "NO" : "YES") + " (" + std::to_string(conf) + "%)].";
}

CassetteEntry make_entry(const Problem& problem, const CiQuery& q, const Counts& counts) {
    CassetteEntry e;
    e.fingerprint = prompt_fingerprint(problem.id, q);
    e.query = q;
    e.model = "gpt-4";
    e.created_at = kCreatedAt;
    int idx = 0;
    for (int i = 0; i < counts.no; ++i) e.completions.push_back(reasoning_text(problem, q, true, idx++));
    for (int i = 0; i < counts.yes; ++i)
        e.completions.push_back(reasoning_text(problem, q, false, idx++));
    for (int i = 0; i < counts.uncertain; ++i)
        e.completions.push_back(
            "The available knowledge does not allow a firm judgement on this question.");
    return e;
}

void write_nao_cassette(const std::string& problems_dir, const std::string& out_path) {
    const Problem problem = load_problem_file(problems_dir + "/nao-dk-med.json");
    std::remove(out_path.c_str());
    CassetteStore store(out_path);

    // Every CI statement both ways at 10-0 per direction, except DK _||_ MED
    // given NAO, whose two directions sum to 17 NO - 3 YES.
    struct Row {
        CiQuery q;
        Counts counts;
    };
    const std::vector<Row> rows = {
        {{"NAO", "DK", {}}, {10, 0, 0}},          {{"DK", "NAO", {}}, {10, 0, 0}},
        {{"NAO", "MED", {}}, {10, 0, 0}},         {{"MED", "NAO", {}}, {10, 0, 0}},
        {{"DK", "MED", {}}, {10, 0, 0}},          {{"MED", "DK", {}}, {10, 0, 0}},
        {{"NAO", "DK", {"MED"}}, {10, 0, 0}},     {{"DK", "NAO", {"MED"}}, {10, 0, 0}},
        {{"NAO", "MED", {"DK"}}, {10, 0, 0}},     {{"MED", "NAO", {"DK"}}, {10, 0, 0}},
        {{"DK", "MED", {"NAO"}}, {8, 2, 0}},      {{"MED", "DK", {"NAO"}}, {9, 1, 0}},
    };
    for (const auto& row : rows) store.record(make_entry(problem, row.q, row.counts));
    std::cout << out_path << ": " << store.size() << " entries\n";
}

void write_spurious_cassette(const std::string& problems_dir, const std::string& out_path) {
    const Problem problem = load_problem_file(problems_dir + "/spurious.json");
    std::remove(out_path.c_str());
    CassetteStore store(out_path);

    // NO-YES counts per designated pair, n = 20 single-direction draws.
    const std::vector<Counts> counts = {
        {4, 16, 0},   // spending / suicides
        {0, 20, 0},   // pool / cage
        {0, 20, 0},   // cheese / bed
        {1, 19, 0},   // divorce / margarine
        {0, 20, 0},   // age / murder
        {9, 11, 0},   // revenue / CS
        {3, 17, 0},   // launches / Soc
        {0, 19, 1},   // mozzarella / engineering
        {0, 20, 0},   // boat / Kentucky
        {0, 20, 0},   // Norway / railway
        {16, 4, 0},   // chicken / oil
        {0, 20, 0},   // swimming-pool / power
        {12, 8, 0},   // cars / crashing
        {0, 20, 0},   // spelling / spiders
        {0, 20, 0},   // maths / uranium
    };
    if (counts.size() != problem.pairs.size()) {
        std::cerr << "pair/count mismatch\n";
        std::exit(1);
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const auto& [x, y] = problem.pairs[i];
        store.record(make_entry(problem, CiQuery(x, y), counts[i]));
    }
    std::cout << out_path << ": " << store.size() << " entries\n";
}

}  // namespace

int main(int argc, char** argv) {
    const std::string data_dir = argc > 1 ? argv[1] : "data";
    const std::string problems = data_dir + "/problems";
    const std::string cassettes = data_dir + "/cassettes";
    std::filesystem::create_directories(cassettes);
    try {
        write_nao_cassette(problems, cassettes + "/nao-dk-med.jsonl");
        write_spurious_cassette(problems, cassettes + "/spurious.jsonl");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
