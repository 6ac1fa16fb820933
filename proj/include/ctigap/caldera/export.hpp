#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctigap/translation/translation.hpp"

namespace ctigap::caldera {

struct Executor {
    std::string platform;
    std::string name;  // shell flavor: sh, psh, cmd, ...
    std::string command;
    std::string cleanup;
    int timeout_s = 60;
    bool operator==(const Executor&) const = default;
};

struct CalderaAbility {
    std::string ability_id;  // name-based UUID: stable across rebuilds
    std::string name;
    std::string description;
    std::string tactic;  // kebab-case, Caldera convention
    std::string technique_id;
    std::string technique_name;
    std::vector<Executor> executors;  // exactly one per ability
    bool operator==(const CalderaAbility&) const = default;
};

struct CalderaAdversary {
    std::string adversary_id;
    std::string name;
    std::string description;
    std::vector<std::string> atomic_ordering;  // ability ids, plan order
    bool operator==(const CalderaAdversary&) const = default;
};

// Deterministic ids for one plan entity.
std::string ability_uuid(const std::string& entity_id, const std::string& attack_id);
std::string adversary_uuid(const std::string& entity_id);

// One ability per plan step, in plan order; markers produce nothing.
// Placeholders in command/cleanup templates are substituted with their
// bound parameter values.
std::vector<CalderaAbility> to_abilities(const translation::EmulationPlan& plan);

// Adversary profile whose atomic_ordering mirrors the plan's step order.
// DomainError when `abilities` does not match the plan 1:1.
CalderaAdversary to_adversary(const translation::EmulationPlan& plan,
                              const std::vector<CalderaAbility>& abilities);

// Exact REST request bodies; also what dry-run writes to disk.
nlohmann::json ability_payload(const CalderaAbility& ability);
nlohmann::json adversary_payload(const CalderaAdversary& adversary);

std::string ability_to_yaml(const CalderaAbility& ability);
std::string adversary_to_yaml(const CalderaAdversary& adversary);
CalderaAbility ability_from_yaml(const std::string& text);
CalderaAdversary adversary_from_yaml(const std::string& text);

// Writes abilities/<tactic>/<ability_id>.yml plus
// adversaries/<adversary_id>.yml under out_dir; returns the paths written
// (relative to out_dir, in write order). Byte-stable across runs.
std::vector<std::string> serialize_artifacts(
    const std::vector<CalderaAbility>& abilities, const CalderaAdversary& adversary,
    const std::string& out_dir);

struct ServerConfig {
    std::string base_url;  // e.g. http://127.0.0.1:8888
    std::string api_key;
    bool dry_run = false;
    std::string dry_run_dir;    // payload directory for dry runs
    int retries = 3;            // attempts per request
    int backoff_ms = 250;       // doubled after each failed attempt
    int poll_interval_ms = 500;
    int operation_timeout_s = 600;
    std::string reset_hook;  // command run between repetitions; empty = none
};

struct PushOutcome {
    std::string kind;  // "ability" | "adversary"
    std::string id;
    std::string endpoint;  // path or dry-run file
    bool ok = false;
    int http_status = 0;
    int attempts = 0;
    std::string error;
};

struct PushReport {
    std::vector<PushOutcome> outcomes;
    bool ok = true;  // every artifact accepted (or written, in dry-run)
};

// Pushes abilities then the adversary with create-or-update semantics
// (HTTP PUT by id). In dry-run mode the exact request bodies are written
// as NN_<kind>_<id>.json files instead. A 401 aborts immediately
// (ServerError naming the endpoint); other failures are retried with
// backoff and reported per artifact.
PushReport push(const std::vector<CalderaAbility>& abilities,
                const CalderaAdversary& adversary, const ServerConfig& config);

enum class OperationState { kCreated, kRunning, kFinished, kFailed };
std::string_view to_string(OperationState state);

struct OperationHandle {
    std::string operation_id;
    std::string server;
    OperationState state = OperationState::kCreated;
    std::optional<nlohmann::json> report;  // present only when finished
};

struct RunReport {
    std::vector<OperationHandle> operations;
    std::size_t reports_collected = 0;
    bool aborted = false;
    std::string abort_reason;
};

// Runs `repetitions` operations sequentially: create, poll to completion,
// collect the report, then run the reset hook before the next repetition.
// Timeout, server failure, or a nonzero hook exit aborts the remaining
// repetitions; everything collected so far is returned.
RunReport run_workflow(const CalderaAdversary& adversary, const ServerConfig& config,
                       int repetitions);

}  // namespace ctigap::caldera
