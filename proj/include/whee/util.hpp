#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace whee {

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 64-bit FNV-1a. Stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Deterministic key for (seed, id) used to order items reproducibly.
std::uint64_t seeded_key(std::uint64_t seed, std::string_view id) noexcept;

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Runs task(i) for i in [0, count) on at most `concurrency` threads.
/// The first exception thrown by a task is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t concurrency,
                  const std::function<void(std::size_t)>& task);

} // namespace whee
