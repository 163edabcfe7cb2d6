#include "exitlab/features.hpp"

#include <sstream>
#include <stdexcept>

namespace exitlab {

namespace {

const char* test_name(CellTest t) {
  switch (t) {
    case CellTest::kEmpty: return "empty";
    case CellTest::kFriend: return "friend";
    case CellTest::kEnemy: return "enemy";
    case CellTest::kOffBoard: return "offboard";
  }
  return "?";
}

CellTest test_from_name(const std::string& name) {
  if (name == "empty") return CellTest::kEmpty;
  if (name == "friend") return CellTest::kFriend;
  if (name == "enemy") return CellTest::kEnemy;
  if (name == "offboard") return CellTest::kOffBoard;
  throw std::invalid_argument("unknown cell test: " + name);
}

}  // namespace

std::string pattern_to_string(const Pattern& p) {
  std::ostringstream out;
  switch (p.kind) {
    case Pattern::Kind::kBias:
      out << "bias";
      break;
    case Pattern::Kind::kCell:
      out << "cell(" << p.dr << ',' << p.dc << ")=" << test_name(p.test);
      break;
    case Pattern::Kind::kOrigin:
      out << "origin(" << p.dr << ',' << p.dc << ")";
      break;
  }
  return out.str();
}

Pattern pattern_from_string(const std::string& text) {
  Pattern p;
  if (text == "bias") return p;
  auto parse_offsets = [&](std::size_t open, std::size_t close) {
    std::string body = text.substr(open + 1, close - open - 1);
    auto comma = body.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("bad pattern: " + text);
    }
    p.dr = std::stoi(body.substr(0, comma));
    p.dc = std::stoi(body.substr(comma + 1));
  };
  if (text.rfind("cell(", 0) == 0) {
    auto close = text.find(')');
    auto eq = text.find('=', close);
    if (close == std::string::npos || eq == std::string::npos) {
      throw std::invalid_argument("bad pattern: " + text);
    }
    p.kind = Pattern::Kind::kCell;
    parse_offsets(4, close);
    p.test = test_from_name(text.substr(eq + 1));
    return p;
  }
  if (text.rfind("origin(", 0) == 0) {
    auto close = text.find(')');
    if (close == std::string::npos || close + 1 != text.size()) {
      throw std::invalid_argument("bad pattern: " + text);
    }
    p.kind = Pattern::Kind::kOrigin;
    parse_offsets(6, close);
    return p;
  }
  throw std::invalid_argument("bad pattern: " + text);
}

FeatureSet FeatureSet::atomic(const Game& game, Player player) {
  FeatureSet fs;
  fs.player_ = player;
  fs.atomic_ = true;
  fs.patterns_.push_back(Pattern{});
  auto offsets = game.pattern_offsets(player);
  fs.offset_count_ = static_cast<int>(offsets.size());
  for (auto [dr, dc] : offsets) {
    for (int t = 0; t < 4; ++t) {
      fs.patterns_.push_back(
          Pattern{Pattern::Kind::kCell, dr, dc, static_cast<CellTest>(t)});
    }
  }
  auto origins = game.origin_offsets(player);
  fs.origin_count_ = static_cast<int>(origins.size());
  for (auto [dr, dc] : origins) {
    fs.patterns_.push_back(
        Pattern{Pattern::Kind::kOrigin, dr, dc, CellTest::kEmpty});
  }
  return fs;
}

FeatureSet FeatureSet::custom(Player player, std::vector<Pattern> patterns) {
  if (patterns.empty() || patterns.front().kind != Pattern::Kind::kBias) {
    throw std::invalid_argument("FeatureSet: pattern 0 must be the bias");
  }
  FeatureSet fs;
  fs.player_ = player;
  fs.patterns_ = std::move(patterns);
  fs.atomic_ = false;
  return fs;
}

std::string FeatureSet::describe() const {
  std::string out;
  for (const Pattern& p : patterns_) {
    out += pattern_to_string(p);
    out += '\n';
  }
  return out;
}

FeatureSet FeatureSet::parse(Player player,
                             const std::vector<std::string>& lines) {
  std::vector<Pattern> patterns;
  patterns.reserve(lines.size());
  for (const std::string& line : lines) {
    patterns.push_back(pattern_from_string(line));
  }
  FeatureSet fs = custom(player, std::move(patterns));
  // Recover the atomic layout when the list matches it exactly: bias, four
  // tests per offset, then origin patterns.
  int i = 1;
  int offsets = 0;
  while (i + 3 < fs.dimension() &&
         fs.patterns_[i].kind == Pattern::Kind::kCell) {
    bool group = true;
    for (int t = 0; t < 4; ++t) {
      const Pattern& p = fs.patterns_[i + t];
      group = group && p.kind == Pattern::Kind::kCell &&
              p.dr == fs.patterns_[i].dr && p.dc == fs.patterns_[i].dc &&
              p.test == static_cast<CellTest>(t);
    }
    if (!group) break;
    ++offsets;
    i += 4;
  }
  int origins = 0;
  while (i + origins < fs.dimension() &&
         fs.patterns_[i + origins].kind == Pattern::Kind::kOrigin) {
    ++origins;
  }
  if (i + origins == fs.dimension()) {
    fs.atomic_ = true;
    fs.offset_count_ = offsets;
    fs.origin_count_ = origins;
  }
  return fs;
}

FeatureVector featurize(const Game& game, const GameState& s, const Action& a,
                        const FeatureSet& fs) {
  if (!game.is_legal(s, a)) {
    throw std::invalid_argument("featurize: illegal action");
  }
  FeatureVector v;
  v.dimension = fs.dimension();
  for_each_active(game, s, a, fs, [&](int i) { v.active.push_back(i); });
  return v;
}

}  // namespace exitlab
