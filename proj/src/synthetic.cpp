#include "cardbench/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cardbench/error.hpp"
#include "cardbench/hash.hpp"

namespace cardbench {
namespace {

using Cells = std::vector<std::optional<double>>;

// Draws 0-based entity indices with Zipf popularity over a random permutation of ranks.
class ZipfPicker {
 public:
  ZipfPicker(std::size_t n, double skew, std::mt19937_64& rng) : weight_(n) {
    std::vector<std::size_t> rank(n);
    std::iota(rank.begin(), rank.end(), 1);
    std::shuffle(rank.begin(), rank.end(), rng);
    for (std::size_t i = 0; i < n; ++i) weight_[i] = 1.0 / std::pow(static_cast<double>(rank[i]), skew);
    dist_ = std::discrete_distribution<std::size_t>(weight_.begin(), weight_.end());
  }

  std::size_t operator()(std::mt19937_64& rng) { return dist_(rng); }
  // Popularity relative to the uniform share; 1 means average.
  double relative(std::size_t i) const {
    return weight_[i] * static_cast<double>(weight_.size()) / std::accumulate(weight_.begin(), weight_.end(), 0.0);
  }

 private:
  std::vector<double> weight_;
  std::discrete_distribution<std::size_t> dist_;
};

std::size_t scaled(double rows, double scale) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(rows * scale)));
}

void add(TableData& table, const char* name, ColumnKind kind, const Cells& cells) {
  table.add_column(Column::from_numeric(name, kind, cells));
}

template <typename T>
T pick(std::mt19937_64& rng, const std::vector<T>& values, const std::vector<double>& weights) {
  std::discrete_distribution<std::size_t> d(weights.begin(), weights.end());
  return values[d(rng)];
}

}  // namespace

Catalog make_stats_like_catalog(const SyntheticOptions& options) {
  if (!(options.scale > 0.0)) fail(ErrorCode::kInvalidArgument, "synthetic scale must be positive");
  const double s = options.scale;
  const std::size_t n_users = scaled(2000, s), n_posts = scaled(4000, s), n_comments = scaled(8000, s),
                    n_votes = scaled(10000, s), n_badges = scaled(6000, s), n_history = scaled(9000, s),
                    n_links = scaled(1200, s), n_tags = scaled(600, s);
  auto rng_for = [&](const char* label) { return std::mt19937_64(derive_seed(options.seed, label)); };
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Catalog catalog;

  // users: reputation, views and votes grow with activity; active users joined earlier.
  auto rng = rng_for("users");
  ZipfPicker user_pick(n_users, options.skew, rng);
  std::vector<double> user_date(n_users);
  {
    TableData t("users");
    Cells id, reputation, created, views, up, down;
    for (std::size_t u = 0; u < n_users; ++u) {
      const double z = std::log(user_pick.relative(u));
      const double rep = std::max(1.0, std::round(std::exp(2.5 + 0.8 * z + 0.7 * normal(rng))));
      user_date[u] = std::floor(3650.0 * std::pow(unit(rng), 1.0 + 0.3 * std::max(0.0, z)));
      const double upvotes = std::round(rep * (0.05 + 0.15 * unit(rng)));
      id.push_back(static_cast<double>(u + 1));
      reputation.push_back(rep);
      created.push_back(user_date[u]);
      views.push_back(std::round(rep * (0.5 + 1.5 * unit(rng))));
      up.push_back(upvotes);
      down.push_back(std::round(upvotes * 0.1 * unit(rng)));
    }
    add(t, "id", ColumnKind::kContinuous, id);
    add(t, "reputation", ColumnKind::kContinuous, reputation);
    add(t, "creation_date", ColumnKind::kContinuous, created);
    add(t, "views", ColumnKind::kContinuous, views);
    add(t, "up_votes", ColumnKind::kContinuous, up);
    add(t, "down_votes", ColumnKind::kContinuous, down);
    catalog.add_table(std::move(t));
  }

  // posts: popular posts score higher and attract more views, answers and comments.
  rng = rng_for("posts");
  ZipfPicker post_pick(n_posts, options.skew, rng);
  std::vector<double> post_date(n_posts);
  {
    TableData t("posts");
    Cells id, type, created, score, view_count, owner, answers, favorites;
    for (std::size_t p = 0; p < n_posts; ++p) {
      const double z = std::log(post_pick.relative(p));
      const double kind = pick<double>(rng, {1, 2, 3, 4, 5, 6, 7}, {45, 50, 1.5, 1, 1, 1, 0.5});
      const std::size_t u = user_pick(rng);
      post_date[p] = std::min(3650.0, user_date[u] + std::floor((3650.0 - user_date[u]) * unit(rng)));
      const double sc = std::round(3.0 * std::max(z, -2.0) + 2.0 * normal(rng) + 2.0);
      id.push_back(static_cast<double>(p + 1));
      type.push_back(kind);
      created.push_back(post_date[p]);
      score.push_back(sc);
      owner.push_back(unit(rng) < 0.02 ? std::nullopt : std::optional<double>(static_cast<double>(u + 1)));
      if (kind == 1) {
        const double v = std::round(std::exp(4.0 + 1.0 * z + 0.6 * normal(rng)));
        view_count.push_back(v);
        answers.push_back(std::round(std::pow(v, 0.3) * unit(rng)));
        favorites.push_back(std::max(0.0, std::round(sc * 0.5 * unit(rng))));
      } else {
        view_count.push_back(std::nullopt);
        answers.push_back(std::nullopt);
        favorites.push_back(std::nullopt);
      }
    }
    add(t, "id", ColumnKind::kContinuous, id);
    add(t, "post_type_id", ColumnKind::kCategorical, type);
    add(t, "creation_date", ColumnKind::kContinuous, created);
    add(t, "score", ColumnKind::kContinuous, score);
    add(t, "view_count", ColumnKind::kContinuous, view_count);
    add(t, "owner_user_id", ColumnKind::kContinuous, owner);
    add(t, "answer_count", ColumnKind::kContinuous, answers);
    add(t, "favorite_count", ColumnKind::kContinuous, favorites);
    catalog.add_table(std::move(t));
  }

  auto later = [&](double base, double spread) { return std::min(3650.0, base + std::floor(spread * unit(rng))); };

  rng = rng_for("comments");
  {
    TableData t("comments");
    Cells post, user, score, created;
    for (std::size_t i = 0; i < n_comments; ++i) {
      const std::size_t p = post_pick(rng);
      post.push_back(static_cast<double>(p + 1));
      user.push_back(unit(rng) < 0.03 ? std::nullopt : std::optional<double>(static_cast<double>(user_pick(rng) + 1)));
      score.push_back(std::floor(-std::log(1.0 - unit(rng)) * (1.0 + 0.5 * std::log1p(post_pick.relative(p)))));
      created.push_back(later(post_date[p], 200));
    }
    add(t, "post_id", ColumnKind::kContinuous, post);
    add(t, "user_id", ColumnKind::kContinuous, user);
    add(t, "score", ColumnKind::kContinuous, score);
    add(t, "creation_date", ColumnKind::kContinuous, created);
    catalog.add_table(std::move(t));
  }

  // votes: only favorite (5) and bounty (8, 9) votes record the voter.
  rng = rng_for("votes");
  {
    TableData t("votes");
    Cells post, type, created, user, bounty;
    for (std::size_t i = 0; i < n_votes; ++i) {
      const std::size_t p = post_pick(rng);
      const double kind = pick<double>(rng, {1, 2, 3, 5, 6, 8, 9, 10}, {5, 70, 10, 8, 2, 2, 1, 2});
      post.push_back(static_cast<double>(p + 1));
      type.push_back(kind);
      created.push_back(later(post_date[p], 365));
      const bool named = kind == 5 || kind == 8 || kind == 9;
      user.push_back(named ? std::optional<double>(static_cast<double>(user_pick(rng) + 1)) : std::nullopt);
      bounty.push_back(kind == 8 || kind == 9 ? std::optional<double>(50.0 * std::ceil(10.0 * unit(rng)))
                                              : std::nullopt);
    }
    add(t, "post_id", ColumnKind::kContinuous, post);
    add(t, "vote_type_id", ColumnKind::kCategorical, type);
    add(t, "creation_date", ColumnKind::kContinuous, created);
    add(t, "user_id", ColumnKind::kContinuous, user);
    add(t, "bounty_amount", ColumnKind::kContinuous, bounty);
    catalog.add_table(std::move(t));
  }

  // badges: bronze dominates; gold badges go to long-standing users.
  rng = rng_for("badges");
  {
    TableData t("badges");
    Cells user, date, klass;
    for (std::size_t i = 0; i < n_badges; ++i) {
      const std::size_t u = user_pick(rng);
      const double seniority = (3650.0 - user_date[u]) / 3650.0;
      klass.push_back(unit(rng) < 0.05 + 0.15 * seniority ? 1.0 : (unit(rng) < 0.25 ? 2.0 : 3.0));
      user.push_back(static_cast<double>(u + 1));
      date.push_back(later(user_date[u], 3650.0 - user_date[u]));
    }
    add(t, "user_id", ColumnKind::kContinuous, user);
    add(t, "date", ColumnKind::kContinuous, date);
    add(t, "class", ColumnKind::kCategorical, klass);
    catalog.add_table(std::move(t));
  }

  rng = rng_for("post_history");
  {
    TableData t("post_history");
    Cells type, post, created, user;
    for (std::size_t i = 0; i < n_history; ++i) {
      const std::size_t p = post_pick(rng);
      type.push_back(pick<double>(rng, {1, 2, 3, 4, 5, 6, 10, 12, 16, 24}, {12, 30, 12, 8, 15, 6, 3, 2, 7, 5}));
      post.push_back(static_cast<double>(p + 1));
      created.push_back(later(post_date[p], 730));
      user.push_back(unit(rng) < 0.05 ? std::nullopt : std::optional<double>(static_cast<double>(user_pick(rng) + 1)));
    }
    add(t, "post_history_type_id", ColumnKind::kCategorical, type);
    add(t, "post_id", ColumnKind::kContinuous, post);
    add(t, "creation_date", ColumnKind::kContinuous, created);
    add(t, "user_id", ColumnKind::kContinuous, user);
    catalog.add_table(std::move(t));
  }

  rng = rng_for("post_links");
  {
    TableData t("post_links");
    Cells created, post, related, type;
    std::uniform_int_distribution<std::size_t> any_post(0, n_posts - 1);
    for (std::size_t i = 0; i < n_links; ++i) {
      const std::size_t p = post_pick(rng);
      post.push_back(static_cast<double>(p + 1));
      related.push_back(static_cast<double>(any_post(rng) + 1));
      created.push_back(later(post_date[p], 365));
      type.push_back(unit(rng) < 0.8 ? 1.0 : 3.0);
    }
    add(t, "creation_date", ColumnKind::kContinuous, created);
    add(t, "post_id", ColumnKind::kContinuous, post);
    add(t, "related_post_id", ColumnKind::kContinuous, related);
    add(t, "link_type_id", ColumnKind::kCategorical, type);
    catalog.add_table(std::move(t));
  }

  rng = rng_for("tags");
  {
    TableData t("tags");
    Cells count, excerpt;
    std::vector<std::size_t> posts(n_posts);
    std::iota(posts.begin(), posts.end(), 0);
    std::shuffle(posts.begin(), posts.end(), rng);
    for (std::size_t i = 0; i < n_tags; ++i) {
      count.push_back(std::max(1.0, std::round(5000.0 / std::pow(static_cast<double>(i + 1), 1.2))));
      excerpt.push_back(unit(rng) < 0.3 || i >= n_posts ? std::nullopt
                                                        : std::optional<double>(static_cast<double>(posts[i] + 1)));
    }
    add(t, "count", ColumnKind::kContinuous, count);
    add(t, "excerpt_post_id", ColumnKind::kContinuous, excerpt);
    catalog.add_table(std::move(t));
  }

  auto join = [&](const char* lt, const char* lc, const char* rt, const char* rc, KeyRole role) {
    catalog.add_join({{lt, lc}, {rt, rc}, role});
  };
  join("users", "id", "posts", "owner_user_id", KeyRole::kPkFk);
  join("users", "id", "comments", "user_id", KeyRole::kPkFk);
  join("users", "id", "badges", "user_id", KeyRole::kPkFk);
  join("users", "id", "votes", "user_id", KeyRole::kPkFk);
  join("users", "id", "post_history", "user_id", KeyRole::kPkFk);
  join("posts", "id", "comments", "post_id", KeyRole::kPkFk);
  join("posts", "id", "votes", "post_id", KeyRole::kPkFk);
  join("posts", "id", "post_history", "post_id", KeyRole::kPkFk);
  join("posts", "id", "post_links", "post_id", KeyRole::kPkFk);
  join("posts", "id", "post_links", "related_post_id", KeyRole::kPkFk);
  join("posts", "id", "tags", "excerpt_post_id", KeyRole::kPkFk);
  join("comments", "user_id", "badges", "user_id", KeyRole::kFkFk);
  return catalog;
}

}  // namespace cardbench
