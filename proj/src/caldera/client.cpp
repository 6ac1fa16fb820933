#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <sys/wait.h>

#include "ctigap/caldera/export.hpp"
#include "ctigap/util/errors.hpp"

namespace ctigap::caldera {
namespace {

nlohmann::json executor_payload(const Executor& executor) {
    return {{"platform", executor.platform},
            {"name", executor.name},
            {"command", executor.command},
            {"cleanup", executor.cleanup},
            {"timeout", executor.timeout_s}};
}

struct HttpResult {
    bool ok = false;          // 2xx
    bool unauthorized = false;
    int status = 0;
    int attempts = 0;
    std::string body;
    std::string error;
};

// Transport failures and 5xx responses are retried with doubling backoff;
// 401 and other 4xx responses are final.
HttpResult request_with_retries(httplib::Client& client, const ServerConfig& config,
                                const std::string& method, const std::string& path,
                                const std::string& body) {
    const httplib::Headers headers = {{"KEY", config.api_key}};
    HttpResult result;
    int backoff = config.backoff_ms;
    const int attempts = std::max(1, config.retries);
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        result.attempts = attempt;
        httplib::Result res =
            method == "PUT"    ? client.Put(path, headers, body, "application/json")
            : method == "POST" ? client.Post(path, headers, body, "application/json")
                               : client.Get(path, headers);
        if (!res) {
            result.error = "transport failure: " + httplib::to_string(res.error());
        } else {
            result.status = res->status;
            result.body = res->body;
            if (res->status >= 200 && res->status < 300) {
                result.ok = true;
                result.error.clear();
                return result;
            }
            result.error = "HTTP " + std::to_string(res->status);
            if (res->status == 401) {
                result.unauthorized = true;
                return result;
            }
            if (res->status < 500) return result;  // client error: do not retry
        }
        if (attempt < attempts && backoff > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
            backoff *= 2;
        }
    }
    return result;
}

std::string dry_run_filename(int index, const std::string& kind,
                             const std::string& id) {
    char prefix[16];
    std::snprintf(prefix, sizeof(prefix), "%02d", index);
    return std::string(prefix) + "_" + kind + "_" + id + ".json";
}

void write_payload(const std::string& dir, const std::string& filename,
                   const nlohmann::json& payload) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw util::IoError("cannot create directory " + dir + ": " + ec.message());
    const fs::path path = fs::path(dir) / filename;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw util::IoError("cannot write " + path.string());
    out << payload.dump(2) << "\n";
    if (!out) throw util::IoError("error writing " + path.string());
}

int hook_exit_code(int system_status) {
    if (system_status == -1) return -1;
    if (WIFEXITED(system_status)) return WEXITSTATUS(system_status);
    return system_status;
}

}  // namespace

nlohmann::json ability_payload(const CalderaAbility& ability) {
    nlohmann::json executors = nlohmann::json::array();
    for (const auto& executor : ability.executors)
        executors.push_back(executor_payload(executor));
    return {{"ability_id", ability.ability_id},
            {"name", ability.name},
            {"description", ability.description},
            {"tactic", ability.tactic},
            {"technique_id", ability.technique_id},
            {"technique_name", ability.technique_name},
            {"executors", std::move(executors)}};
}

nlohmann::json adversary_payload(const CalderaAdversary& adversary) {
    return {{"adversary_id", adversary.adversary_id},
            {"name", adversary.name},
            {"description", adversary.description},
            {"atomic_ordering", adversary.atomic_ordering}};
}

PushReport push(const std::vector<CalderaAbility>& abilities,
                const CalderaAdversary& adversary, const ServerConfig& config) {
    PushReport report;

    if (config.dry_run) {
        const std::string dir =
            config.dry_run_dir.empty() ? "." : config.dry_run_dir;
        int index = 1;
        for (const auto& ability : abilities) {
            const std::string filename =
                dry_run_filename(index++, "ability", ability.ability_id);
            write_payload(dir, filename, ability_payload(ability));
            report.outcomes.push_back(
                {"ability", ability.ability_id, filename, true, 0, 0, ""});
        }
        const std::string filename =
            dry_run_filename(index, "adversary", adversary.adversary_id);
        write_payload(dir, filename, adversary_payload(adversary));
        report.outcomes.push_back(
            {"adversary", adversary.adversary_id, filename, true, 0, 0, ""});
        return report;
    }

    httplib::Client client(config.base_url);
    client.set_connection_timeout(std::chrono::seconds(5));
    client.set_read_timeout(std::chrono::seconds(30));

    auto push_one = [&](const std::string& kind, const std::string& id,
                        const nlohmann::json& payload) {
        const std::string collection =
            kind == "ability" ? "abilities" : "adversaries";
        const std::string path = "/api/v2/" + collection + "/" + id;  // create-or-update
        HttpResult result =
            request_with_retries(client, config, "PUT", path, payload.dump());
        if (result.unauthorized)
            throw util::ServerError("authentication rejected at " + config.base_url +
                                        path,
                                    result.status, result.body);
        report.outcomes.push_back({kind, id, path, result.ok, result.status,
                                   result.attempts, result.error});
        if (!result.ok) report.ok = false;
    };
    for (const auto& ability : abilities)
        push_one("ability", ability.ability_id, ability_payload(ability));
    push_one("adversary", adversary.adversary_id, adversary_payload(adversary));
    return report;
}

RunReport run_workflow(const CalderaAdversary& adversary, const ServerConfig& config,
                       int repetitions) {
    RunReport report;
    if (repetitions <= 0) return report;

    httplib::Client client(config.base_url);
    client.set_connection_timeout(std::chrono::seconds(5));
    client.set_read_timeout(std::chrono::seconds(30));

    auto abort_run = [&](const std::string& reason) {
        report.aborted = true;
        report.abort_reason = reason;
    };

    for (int rep = 1; rep <= repetitions; ++rep) {
        OperationHandle handle;
        handle.server = config.base_url;

        nlohmann::json create_body = {
            {"name", adversary.name + " run " + std::to_string(rep)},
            {"adversary_id", adversary.adversary_id}};
        HttpResult created = request_with_retries(client, config, "POST",
                                                  "/api/v2/operations",
                                                  create_body.dump());
        if (!created.ok) {
            abort_run("operation create failed on repetition " + std::to_string(rep) +
                      ": " + created.error);
            break;
        }
        try {
            handle.operation_id =
                nlohmann::json::parse(created.body).at("id").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            abort_run(std::string("malformed operation-create response: ") + e.what());
            break;
        }
        handle.state = OperationState::kCreated;

        const auto deadline = std::chrono::steady_clock::now() +
                              std::chrono::seconds(config.operation_timeout_s);
        const std::string op_path = "/api/v2/operations/" + handle.operation_id;
        bool finished = false;
        while (true) {
            if (std::chrono::steady_clock::now() >= deadline) break;
            HttpResult polled =
                request_with_retries(client, config, "GET", op_path, "");
            if (!polled.ok) {
                abort_run("poll failed for operation " + handle.operation_id + ": " +
                          polled.error);
                break;
            }
            std::string state;
            try {
                state = nlohmann::json::parse(polled.body)
                            .value("state", std::string("running"));
            } catch (const nlohmann::json::exception&) {
                abort_run("malformed poll response for operation " +
                          handle.operation_id);
                break;
            }
            if (state == "finished") {
                finished = true;
                break;
            }
            if (state == "failed") {
                handle.state = OperationState::kFailed;
                abort_run("operation " + handle.operation_id + " failed on server");
                break;
            }
            handle.state = OperationState::kRunning;
            if (config.poll_interval_ms > 0)
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(config.poll_interval_ms));
        }
        if (!finished && !report.aborted)
            abort_run("timeout waiting for operation " +
                      (handle.operation_id.empty() ? std::string("(unknown)")
                                                   : handle.operation_id));
        if (!finished) {
            if (handle.state != OperationState::kFailed)
                handle.state = OperationState::kFailed;
            report.operations.push_back(std::move(handle));
            break;
        }

        HttpResult collected =
            request_with_retries(client, config, "GET", op_path + "/report", "");
        if (!collected.ok) {
            handle.state = OperationState::kFailed;
            report.operations.push_back(std::move(handle));
            abort_run("report collection failed for operation " +
                      handle.operation_id + ": " + collected.error);
            break;
        }
        try {
            handle.report = nlohmann::json::parse(collected.body);
        } catch (const nlohmann::json::exception&) {
            handle.state = OperationState::kFailed;
            report.operations.push_back(std::move(handle));
            abort_run("malformed report for operation " + handle.operation_id);
            break;
        }
        handle.state = OperationState::kFinished;
        ++report.reports_collected;
        report.operations.push_back(std::move(handle));

        if (rep < repetitions && !config.reset_hook.empty()) {
            const int status = std::system(config.reset_hook.c_str());
            const int code = hook_exit_code(status);
            if (code != 0) {
                abort_run("reset hook exited with status " + std::to_string(code) +
                          " after repetition " + std::to_string(rep));
                break;
            }
        }
    }
    return report;
}

}  // namespace ctigap::caldera
