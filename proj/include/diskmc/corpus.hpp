#pragma once

#include <string>
#include <vector>

namespace diskmc {

// Built-in example models. Every expected value below is a closed form of
// the model parameters, frozen here so the engines are checked against
// numbers derived without running either of them.

std::string coin_model();      // one fair flip
std::string die_model();       // fair die from fair coins, 13 states
std::string geometric_model(); // retry until success, expected tries = 2
std::string infinite_model();  // target missed with probability 1/2

// Bounded-retransmission style protocol: `frames` payload frames, each sent
// until it gets through or `max_retries` retries are spent. Attempt success
// probability is 0.9604, forward-acyclic when partitioned by frame counter.
std::string brp_model(int frames, int max_retries);
double brp_p_ok(int frames, int max_retries);
double brp_expected_sends(int frames, int max_retries);

// Shared counter started at k, two coins per step (fair and down-biased);
// wins when the counter hits 2k, loses at 0. The partition graph is cyclic.
std::string consensus_model(int k);
double consensus_p_min(int k);

struct CorpusCase {
    std::string name;     // "<model>/<property>"
    std::string model;    // full source text
    std::string property; // property to check
    double expected;      // may be +infinity
    double tolerance;     // absolute, ignored for infinite values
};

std::vector<CorpusCase> builtin_corpus();

} // namespace diskmc
