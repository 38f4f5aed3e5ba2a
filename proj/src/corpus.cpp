#include "diskmc/corpus.hpp"

#include <cmath>
#include <limits>

namespace diskmc {

std::string coin_model() {
    return "var s : 0..2 init 0;\n"
           "[] s = 0 -> 0.5 : (s' = 1) + 0.5 : (s' = 2);\n"
           "property heads = Pmax(s = 2);\n"
           "partition s + 1 bound 3;\n";
}

std::string die_model() {
    return "var s : 0..6 init 0;\n"
           "var d : 0..6 init 0;\n"
           "[] s = 0 & d = 0 -> 0.5 : (s' = 1) + 0.5 : (s' = 2);\n"
           "[] s = 1 & d = 0 -> 0.5 : (s' = 3) + 0.5 : (s' = 4);\n"
           "[] s = 2 & d = 0 -> 0.5 : (s' = 5) + 0.5 : (s' = 6);\n"
           "[] s = 3 & d = 0 -> 0.5 : (s' = 1) + 0.5 : (d' = 1);\n"
           "[] s = 4 & d = 0 -> 0.5 : (d' = 2) + 0.5 : (d' = 3);\n"
           "[] s = 5 & d = 0 -> 0.5 : (d' = 4) + 0.5 : (d' = 5);\n"
           "[] s = 6 & d = 0 -> 0.5 : (s' = 2) + 0.5 : (d' = 6);\n"
           "property six = Pmax(d = 6);\n"
           "property six_min = Pmin(d = 6);\n"
           "partition s + 1 bound 7;\n";
}

std::string geometric_model() {
    return "var done : 0..1 init 0;\n"
           "[] done = 0 -> 0.5 : (done' = 1) reward 1 + 0.5 : (done' = 0) reward 1;\n"
           "property tries = Rmax(done = 1);\n"
           "partition done + 1 bound 2;\n";
}

std::string infinite_model() {
    return "var s : 0..2 init 0;\n"
           "[] s = 0 -> 0.5 : (s' = 1) reward 1 + 0.5 : (s' = 2) reward 1;\n"
           "[] s = 2 -> (s' = 2);\n"
           "property cost = Rmax(s = 1);\n"
           "property cost_min = Rmin(s = 1);\n"
           "partition s + 1 bound 3;\n";
}

std::string brp_model(int frames, int max_retries) {
    std::string n = std::to_string(frames);
    std::string m = std::to_string(max_retries);
    return "const N = " + n + ";\n" +
           "const MAXR = " + m + ";\n" +
           "var i : 0..N init 0;\n"
           "var r : 0..MAXR init 0;\n"
           "var st : 0..2 init 0;\n"
           "[] st = 0 & i < N ->\n"
           "    0.9604 : (i' = i + 1) & (r' = 0) & (st' = (i + 1 = N ? 1 : 0)) reward 1\n"
           "  + 0.0396 : (r' = min(r + 1, MAXR)) & (st' = (r = MAXR ? 2 : 0)) reward 1;\n"
           "property all_sent = Pmax(st = 1);\n"
           "property sends = Rmax(st > 0);\n"
           "partition i + 1 bound N + 1;\n";
}

double brp_p_ok(int frames, int max_retries) {
    double q = 0.0396;
    double frame_ok = 1.0 - std::pow(q, max_retries + 1);
    return std::pow(frame_ok, frames);
}

double brp_expected_sends(int frames, int max_retries) {
    double q = 0.0396;
    double frame_ok = 1.0 - std::pow(q, max_retries + 1);
    // Attempts spent on one frame, then frames attempted at all.
    double per_frame = (1.0 - std::pow(q, max_retries + 1)) / (1.0 - q);
    double frames_tried = (1.0 - std::pow(frame_ok, frames)) / (1.0 - frame_ok);
    return per_frame * frames_tried;
}

std::string consensus_model(int k) {
    std::string ks = std::to_string(k);
    return "const K = " + ks + ";\n" +
           "var c : 0..2 * K init K;\n"
           "[] c > 0 & c < 2 * K -> 0.5 : (c' = c - 1) + 0.5 : (c' = c + 1);\n"
           "[] c > 0 & c < 2 * K -> 0.6 : (c' = c - 1) + 0.4 : (c' = c + 1);\n"
           "property win = Pmax(c = 2 * K);\n"
           "property win_min = Pmin(c = 2 * K);\n"
           "partition max(c - K, K - c) + 1 bound K + 1;\n";
}

double consensus_p_min(int k) {
    // Gambler's ruin for the down-biased coin, up probability 0.4.
    double r = 0.6 / 0.4;
    return (1.0 - std::pow(r, k)) / (1.0 - std::pow(r, 2 * k));
}

std::vector<CorpusCase> builtin_corpus() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<CorpusCase> cases;
    cases.push_back({"coin/heads", coin_model(), "heads", 0.5, 1e-9});
    cases.push_back({"die/six", die_model(), "six", 1.0 / 6.0, 1e-5});
    cases.push_back({"die/six_min", die_model(), "six_min", 1.0 / 6.0, 1e-5});
    cases.push_back({"geometric/tries", geometric_model(), "tries", 2.0, 1e-4});
    cases.push_back({"brp16/all_sent", brp_model(16, 3), "all_sent", brp_p_ok(16, 3), 1e-5});
    cases.push_back({"brp16/sends", brp_model(16, 3), "sends", brp_expected_sends(16, 3), 1e-3});
    cases.push_back({"consensus4/win", consensus_model(4), "win", 0.5, 1e-4});
    cases.push_back(
        {"consensus4/win_min", consensus_model(4), "win_min", consensus_p_min(4), 1e-4});
    cases.push_back({"infinite/cost", infinite_model(), "cost", inf, 0.0});
    cases.push_back({"infinite/cost_min", infinite_model(), "cost_min", inf, 0.0});
    return cases;
}

} // namespace diskmc
