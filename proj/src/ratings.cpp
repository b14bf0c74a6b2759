#include "kernelcf/ratings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "kernelcf/detail/rng.hpp"
#include "kernelcf/errors.hpp"

namespace kernelcf {

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

bool parse_double(const std::string& text, double& out) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc{} && res.ptr == end && std::isfinite(out);
}

// Splits on comma when present, else tab. Exactly three fields expected.
bool split_triple(const std::string& line, std::string fields[3]) {
    const char delim = line.find(',') != std::string::npos ? ',' : '\t';
    std::size_t start = 0;
    int count = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == delim) {
            if (count >= 3) return false;
            fields[count++] = line.substr(start, i - start);
            start = i + 1;
        }
    }
    return count == 3;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

bool RatingsMatrix::add(const std::string& user_id, const std::string& item_id, double value) {
    const int u = intern_user(user_id);
    const int i = intern_item(item_id);
    auto [it, inserted] = by_user_[u].insert_or_assign(i, value);
    by_item_[i].insert_or_assign(u, value);
    if (inserted) ++entry_count_;
    return inserted;
}

int RatingsMatrix::user_index(const std::string& user_id) const {
    auto it = user_index_.find(user_id);
    return it == user_index_.end() ? -1 : it->second;
}

int RatingsMatrix::item_index(const std::string& item_id) const {
    auto it = item_index_.find(item_id);
    return it == item_index_.end() ? -1 : it->second;
}

std::optional<double> RatingsMatrix::rating(int user, int item) const {
    const auto& profile = by_user_.at(user);
    auto it = profile.find(item);
    if (it == profile.end()) return std::nullopt;
    return it->second;
}

std::vector<Rating> RatingsMatrix::entries() const {
    std::vector<Rating> out;
    out.reserve(entry_count_);
    for (std::size_t u = 0; u < by_user_.size(); ++u) {
        for (const auto& [i, v] : by_user_[u]) {
            out.push_back({users_[u], items_[i], v});
        }
    }
    return out;
}

double RatingsMatrix::global_mean() const {
    if (entry_count_ == 0) return 0.0;
    double sum = 0.0;
    for (const auto& profile : by_user_) {
        for (const auto& [i, v] : profile) sum += v;
    }
    return sum / static_cast<double>(entry_count_);
}

std::optional<double> RatingsMatrix::user_mean(int user) const {
    const auto& profile = by_user_.at(user);
    if (profile.empty()) return std::nullopt;
    double sum = 0.0;
    for (const auto& [i, v] : profile) sum += v;
    return sum / static_cast<double>(profile.size());
}

std::optional<double> RatingsMatrix::item_mean(int item) const {
    const auto& profile = by_item_.at(item);
    if (profile.empty()) return std::nullopt;
    double sum = 0.0;
    for (const auto& [u, v] : profile) sum += v;
    return sum / static_cast<double>(profile.size());
}

double RatingsMatrix::min_rating() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& profile : by_user_) {
        for (const auto& [i, v] : profile) m = std::min(m, v);
    }
    return m;
}

double RatingsMatrix::max_rating() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& profile : by_user_) {
        for (const auto& [i, v] : profile) m = std::max(m, v);
    }
    return m;
}

RatingsMatrix RatingsMatrix::with_same_index() const {
    RatingsMatrix out;
    out.users_ = users_;
    out.items_ = items_;
    out.user_index_ = user_index_;
    out.item_index_ = item_index_;
    out.by_user_.resize(users_.size());
    out.by_item_.resize(items_.size());
    return out;
}

void RatingsMatrix::set_by_index(int user, int item, double value) {
    auto [it, inserted] = by_user_.at(user).insert_or_assign(item, value);
    by_item_.at(item).insert_or_assign(user, value);
    if (inserted) ++entry_count_;
}

int RatingsMatrix::intern_user(const std::string& id) {
    auto it = user_index_.find(id);
    if (it != user_index_.end()) return it->second;
    const int index = static_cast<int>(users_.size());
    users_.push_back(id);
    user_index_.emplace(id, index);
    by_user_.emplace_back();
    return index;
}

int RatingsMatrix::intern_item(const std::string& id) {
    auto it = item_index_.find(id);
    if (it != item_index_.end()) return it->second;
    const int index = static_cast<int>(items_.size());
    items_.push_back(id);
    item_index_.emplace(id, index);
    by_item_.emplace_back();
    return index;
}

RatingsMatrix parse_ratings(std::istream& in, IngestStats* stats) {
    RatingsMatrix matrix;
    IngestStats local;
    IngestStats& s = stats ? *stats : local;
    s = IngestStats{};

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        ++s.lines_read;
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;

        std::string fields[3];
        double value = 0.0;
        const bool shape_ok = split_triple(stripped, fields);
        const bool value_ok = shape_ok && parse_double(trim(fields[2]), value);
        if (!shape_ok || !value_ok) {
            // First line may be a header; skip it silently.
            if (line_no == 1) {
                s.header_skipped = true;
                continue;
            }
            ++s.skipped;
            std::ostringstream msg;
            msg << "line " << line_no << ": "
                << (shape_ok ? "rating is not a finite number" : "expected 3 delimited fields");
            s.line_errors.push_back(msg.str());
            continue;
        }
        const std::string user = trim(fields[0]);
        const std::string item = trim(fields[1]);
        if (user.empty() || item.empty()) {
            ++s.skipped;
            std::ostringstream msg;
            msg << "line " << line_no << ": empty user or item id";
            s.line_errors.push_back(msg.str());
            continue;
        }
        if (!matrix.add(user, item, value)) ++s.duplicates;
        ++s.parsed;
    }
    return matrix;
}

RatingsMatrix load_ratings(const std::string& path, IngestStats* stats) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open ratings file: " + path);
    return parse_ratings(in, stats);
}

void write_ratings(const RatingsMatrix& matrix, std::ostream& out) {
    for (std::size_t u = 0; u < matrix.user_count(); ++u) {
        for (const auto& [i, v] : matrix.user_profile(static_cast<int>(u))) {
            out << matrix.user_id(static_cast<int>(u)) << ',' << matrix.item_id(i) << ','
                << format_double(v) << '\n';
        }
    }
}

void save_ratings(const RatingsMatrix& matrix, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IngestError("cannot write ratings file: " + path);
    write_ratings(matrix, out);
}

DatasetSplit split(const RatingsMatrix& matrix, double holdout_fraction, std::uint64_t seed) {
    if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
        throw std::invalid_argument("holdout_fraction must lie in (0, 1)");
    }
    if (matrix.empty()) throw std::invalid_argument("cannot split an empty ratings matrix");

    std::vector<std::pair<int, int>> coords;
    coords.reserve(matrix.entry_count());
    for (std::size_t u = 0; u < matrix.user_count(); ++u) {
        for (const auto& [i, v] : matrix.user_profile(static_cast<int>(u))) {
            coords.emplace_back(static_cast<int>(u), i);
        }
    }

    std::mt19937_64 rng(seed);
    detail::shuffle(coords, rng);

    const auto test_size = static_cast<std::size_t>(
        std::llround(holdout_fraction * static_cast<double>(coords.size())));

    DatasetSplit out;
    out.seed = seed;
    out.holdout_fraction = holdout_fraction;
    out.train = matrix.with_same_index();
    out.test = matrix.with_same_index();
    for (std::size_t k = 0; k < coords.size(); ++k) {
        const auto [u, i] = coords[k];
        const double v = *matrix.rating(u, i);
        if (k < test_size) {
            out.test.set_by_index(u, i, v);
        } else {
            out.train.set_by_index(u, i, v);
        }
    }
    return out;
}

}  // namespace kernelcf
