// Prints one pass/fail line per acceptance criterion.
#include <cstdio>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "criteria.hpp"

using namespace tpkin::acceptance;

int main(int argc, char **argv)
{
    CLI::App app{"acceptance criteria 1-10"};
    std::vector<int> only;
    bool verbose = false;
    std::string json_path;
    app.add_option("-c,--criterion", only, "run only these criteria")->check(CLI::Range(1, 10));
    app.add_flag("-v,--verbose", verbose, "progress messages on stderr");
    app.add_option("--json", json_path, "write the results as JSON");
    CLI11_PARSE(app, argc, argv);
    std::set<int> pick(only.begin(), only.end());
    if (pick.empty())
        for (int i = 1; i <= 10; ++i) pick.insert(i);

    auto log = [&](const std::string &m) {
        if (verbose) std::cerr << "  " << m << std::endl;
    };
    std::vector<std::function<CriterionResult()>> all{
        criterion_1, criterion_2, criterion_3, criterion_4,
        criterion_5, criterion_6, criterion_7, [&] { return criterion_8(nullptr, log); },
        [&] { return criterion_9(log); }, criterion_10};
    bool ok = true;
    json out = json::array();
    for (int id : pick) {
        CriterionResult r;
        try {
            r = all[id - 1]();
        } catch (const std::exception &e) {
            r.id = id;
            r.title = "criterion " + std::to_string(id);
            r.passed = false;
            r.detail = std::string("error: ") + e.what();
        }
        std::printf("criterion %2d %s  %s: %s\n", r.id, r.passed ? "PASS" : "FAIL", r.title.c_str(), r.detail.c_str());
        std::fflush(stdout);
        ok = ok && r.passed;
        out.push_back({{"criterion", r.id}, {"title", r.title}, {"passed", r.passed}, {"detail", r.detail}, {"data", r.data}});
    }
    if (!json_path.empty()) std::ofstream(json_path) << out.dump(2) << "\n";
    return ok ? 0 : 1;
}
