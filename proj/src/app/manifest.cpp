#include "wgqed/app/manifest.h"

#include "wgqed/errors.h"
#include "wgqed/fft.h"

#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <memory>

namespace wgqed::app {

namespace {

constexpr const char *kToolVersion = "0.3.0";

} // namespace

std::string sha256_hex(const std::string &data)
{
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static const char *hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

RunRecorder::RunRecorder(std::string command, std::string out_dir, nlohmann::json parameters)
    : command_(std::move(command)), out_dir_(std::move(out_dir)), parameters_(std::move(parameters))
{
    nlohmann::json key = {{"command", command_}, {"parameters", parameters_}, {"version", kToolVersion}};
    run_hash_ = sha256_hex(key.dump());
    std::error_code ec;
    std::filesystem::create_directories(out_dir_, ec);
    if (ec) {
        throw ConfigError("cannot create output directory " + out_dir_ + ": " + ec.message());
    }
}

void RunRecorder::write(const std::string &name, const std::string &content)
{
    const auto path = std::filesystem::path(out_dir_) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw ConfigError("cannot write " + path.string());
    }
    f << content;
    f.close();
    outputs_.push_back({{"file", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
    files_.push_back(path.string());
}

void RunRecorder::finish(double wall_seconds)
{
    nlohmann::json m;
    m["tool"] = "wgqed";
    m["command"] = command_;
    m["engine"] = {{"version", kToolVersion}, {"fft", fft::backend_version()}};
    m["parameters"] = parameters_;
    m["outputs"] = outputs_;
    m["run_hash"] = run_hash_;
    m["wall_time_s"] = wall_seconds;
    for (const auto &[k, v] : extra_.items()) {
        m[k] = v;
    }
    {
        const auto path = std::filesystem::path(out_dir_) / "manifest.json";
        std::ofstream f(path, std::ios::binary);
        if (!f) {
            throw ConfigError("cannot write " + path.string());
        }
        f << m.dump(2) << "\n";
        files_.push_back(path.string());
    }
}

} // namespace wgqed::app
