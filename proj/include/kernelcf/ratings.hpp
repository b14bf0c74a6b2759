#ifndef KERNELCF_RATINGS_HPP
#define KERNELCF_RATINGS_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace kernelcf {

struct Rating {
    std::string user_id;
    std::string item_id;
    double value = 0.0;
};

// Sparse user x item rating store. Ids are mapped to dense indices in
// first-seen order; duplicate (user, item) pairs resolve last-write-wins.
class RatingsMatrix {
public:
    RatingsMatrix() = default;

    // Adds or overwrites one rating. Returns false when an existing pair
    // was overwritten.
    bool add(const std::string& user_id, const std::string& item_id, double value);

    std::size_t user_count() const { return users_.size(); }
    std::size_t item_count() const { return items_.size(); }
    std::size_t entry_count() const { return entry_count_; }
    bool empty() const { return entry_count_ == 0; }

    const std::vector<std::string>& users() const { return users_; }
    const std::vector<std::string>& items() const { return items_; }
    const std::string& user_id(int index) const { return users_.at(index); }
    const std::string& item_id(int index) const { return items_.at(index); }

    // -1 when the id is unknown.
    int user_index(const std::string& user_id) const;
    int item_index(const std::string& item_id) const;

    std::optional<double> rating(int user, int item) const;

    // Profiles are sorted by index; safe to iterate for pairwise metrics.
    const std::map<int, double>& user_profile(int user) const { return by_user_.at(user); }
    const std::map<int, double>& item_profile(int item) const { return by_item_.at(item); }

    // All entries ordered by (user index, item index).
    std::vector<Rating> entries() const;

    double global_mean() const;
    std::optional<double> user_mean(int user) const;
    std::optional<double> item_mean(int item) const;
    double min_rating() const;
    double max_rating() const;

    // Creates an empty matrix sharing this matrix's user/item index, so
    // entry coordinates stay comparable across train/test splits.
    RatingsMatrix with_same_index() const;
    void set_by_index(int user, int item, double value);

private:
    int intern_user(const std::string& id);
    int intern_item(const std::string& id);

    std::vector<std::string> users_;
    std::vector<std::string> items_;
    std::unordered_map<std::string, int> user_index_;
    std::unordered_map<std::string, int> item_index_;
    std::vector<std::map<int, double>> by_user_;
    std::vector<std::map<int, double>> by_item_;
    std::size_t entry_count_ = 0;
};

struct IngestStats {
    std::size_t lines_read = 0;
    std::size_t parsed = 0;
    std::size_t duplicates = 0;
    std::size_t skipped = 0;
    bool header_skipped = false;
    std::vector<std::string> line_errors;
};

// Reads "user,item,rating" triples (comma or tab separated, optional
// header). Malformed lines are skipped and reported through stats.
RatingsMatrix load_ratings(const std::string& path, IngestStats* stats = nullptr);
RatingsMatrix parse_ratings(std::istream& in, IngestStats* stats = nullptr);

// Writes entries back in the same triple format, ordered by index.
void save_ratings(const RatingsMatrix& matrix, const std::string& path);
void write_ratings(const RatingsMatrix& matrix, std::ostream& out);

struct DatasetSplit {
    RatingsMatrix train;
    RatingsMatrix test;
    std::uint64_t seed = 0;
    double holdout_fraction = 0.0;
};

// Deterministic per-rating holdout: |test| = round(fraction * entries).
DatasetSplit split(const RatingsMatrix& matrix, double holdout_fraction, std::uint64_t seed);

}  // namespace kernelcf

#endif
