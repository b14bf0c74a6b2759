#ifndef KERNELCF_TESTS_FIXTURES_HPP
#define KERNELCF_TESTS_FIXTURES_HPP

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "kernelcf/ratings.hpp"
#include "kernelcf/similarity.hpp"
#include "support/random.hpp"

namespace testsupport {

// Writes content to a unique temp file and removes it on destruction.
class TempFile {
public:
    explicit TempFile(const std::string& content = "", const std::string& stem = "kernelcf_test") {
        static int counter = 0;
        path_ = (std::filesystem::temp_directory_path() /
                 (stem + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++)))
                    .string();
        std::ofstream out(path_);
        out << content;
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

// Two taste groups: group-A users like the first half of the items, group-B
// users the second half, with noise on top. Yields a connected, clustered
// rating matrix with a known observed range.
inline kernelcf::RatingsMatrix synthetic_ratings(int n_users, int n_items, int n_ratings,
                                                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    kernelcf::RatingsMatrix m;
    int added = 0;
    while (added < n_ratings) {
        const int u = static_cast<int>(rng() % n_users);
        const int i = static_cast<int>(rng() % n_items);
        const bool user_a = u < n_users / 2;
        const bool item_a = i < n_items / 2;
        const double base = (user_a == item_a) ? 4.5 : 1.5;
        double value = base + uniform(rng, -0.5, 0.5);
        value = std::min(5.0, std::max(1.0, value));
        if (m.add("u" + std::to_string(u), "i" + std::to_string(i), value)) ++added;
    }
    return m;
}

// Two 10-user cliques over disjoint item sets. Every clique member rates a
// shared core of ten items plus one extra, so each user has unrated
// same-clique items to recommend. User a0 bridges the cliques by also
// rating one clique-B item.
inline kernelcf::RatingsMatrix two_clique_ratings() {
    kernelcf::RatingsMatrix m;
    auto fill_clique = [&m](const std::string& user_prefix, const std::string& item_prefix) {
        for (int u = 0; u < 10; ++u) {
            const std::string user = user_prefix + std::to_string(u);
            for (int i = 0; i < 10; ++i) {
                // Per-user value pattern keeps user means unequal.
                const double value = 3.0 + ((u + i) % 3);
                m.add(user, item_prefix + std::to_string(i), value);
            }
            m.add(user, item_prefix + std::to_string(10 + (u % 6)), 5.0);
        }
    };
    fill_clique("a", "A");
    fill_clique("b", "B");
    m.add("a0", "B0", 4.0);  // bridge
    return m;
}

// Graph with two planted cliques (similarity 1 edges) and one bridge edge.
inline kernelcf::SimilarityGraph planted_cliques(int clique_size = 10) {
    std::vector<std::string> ids;
    for (int i = 0; i < 2 * clique_size; ++i) ids.push_back("n" + std::to_string(i));
    kernelcf::SimilarityGraph g(kernelcf::GraphMode::User, std::move(ids));
    for (int c = 0; c < 2; ++c) {
        const int base = c * clique_size;
        for (int i = 0; i < clique_size; ++i) {
            for (int j = i + 1; j < clique_size; ++j) {
                g.add_edge(base + i, base + j, 1.0);
            }
        }
    }
    g.add_edge(0, clique_size, 1.0);  // bridge
    return g;
}

}  // namespace testsupport

#endif
