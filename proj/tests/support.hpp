#pragma once

#include "whee/core_model.hpp"
#include "whee/corpus.hpp"

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

namespace whee::testing {

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(WHEE_FIXTURE_DIR) / name;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("whee_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline Utterance speaker(const std::string& id, const std::string& text) {
    return make_utterance(id, "c-" + id, 0, Role::Speaker, text, Source::Synthetic);
}

inline CueProfile random_cues(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> code(0, 2);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    return CueProfile(who_from_code(code(rng)), sentiment_from_code(code(rng)), unit(rng), unit(rng),
                      level_from_code(code(rng)), level_from_code(code(rng)), level_from_code(code(rng)));
}

/// One conversation per item, a single speaker turn each.
inline std::vector<corpus::LabeledUtterance> flat_corpus(std::size_t n) {
    std::vector<corpus::LabeledUtterance> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto id = "u" + std::to_string(i);
        out.push_back({make_utterance(id, "c" + std::to_string(i), 0, Role::Speaker, "text " + id,
                                      Source::Synthetic),
                       EmpathyDirection::Seeking, std::nullopt});
    }
    return out;
}

} // namespace whee::testing
