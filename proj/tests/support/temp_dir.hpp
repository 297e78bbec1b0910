#ifndef REVSPLIT_TESTS_TEMP_DIR_HPP
#define REVSPLIT_TESTS_TEMP_DIR_HPP

#include <atomic>
#include <chrono>
#include <filesystem>
#include <string>

namespace revsplit::testsupport {

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::atomic<unsigned> counter{0};
        const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
        path = std::filesystem::temp_directory_path() /
               ("revsplit-test-" + std::to_string(stamp) + "-" +
                std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path);
    }

    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }

    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

} // namespace revsplit::testsupport

#endif
