#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace wgqed::app {

std::string sha256_hex(const std::string &data);

// Collects output files and writes them plus manifest.json into one directory.
class RunRecorder {
public:
    RunRecorder(std::string command, std::string out_dir, nlohmann::json parameters);

    const std::string &run_hash() const { return run_hash_; }
    nlohmann::json &extra() { return extra_; }

    // Writes `content` to <out_dir>/<name> and records its hash.
    void write(const std::string &name, const std::string &content);

    // Writes manifest.json; wall time is the only field that varies between reruns.
    void finish(double wall_seconds);

    const std::vector<std::string> &files() const { return files_; }

private:
    std::string command_;
    std::string out_dir_;
    nlohmann::json parameters_;
    nlohmann::json outputs_ = nlohmann::json::array();
    nlohmann::json extra_ = nlohmann::json::object();
    std::string run_hash_;
    std::vector<std::string> files_;
};

} // namespace wgqed::app
