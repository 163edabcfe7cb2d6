#include "exitlab/games.hpp"

#include <algorithm>
#include <stdexcept>

namespace exitlab {

namespace {

const std::vector<std::pair<int, int>> kSquareOffsets = {
    {-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}};

const std::vector<std::pair<int, int>> kHexOffsets = {
    {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}};

Terminal win_for(Player p) { return Terminal{ResultKind::kWin, p}; }
Terminal draw_result() { return Terminal{ResultKind::kDraw, 0}; }

}  // namespace

BoardGame::BoardGame(std::string name, int rows, int cols, int ply_cap)
    : name_(std::move(name)), rows_(rows), cols_(cols), ply_cap_(ply_cap) {
  if (ply_cap_ < 0) ply_cap_ = 4 * rows_ * cols_;
}

GameState BoardGame::initial_state() const {
  GameState s;
  s.board.assign(static_cast<std::size_t>(cell_count()), 0);
  setup_board(s.board);
  s.mover = kPlayer1;
  s.ply = 0;
  s.terminal = Terminal{};
  return s;
}

void BoardGame::gen_moves(const Board& board, Player,
                          std::vector<Action>& out) const {
  for (int cell = 0; cell < cell_count(); ++cell) {
    if (board[cell] == 0) out.push_back(placement(cell));
  }
}

bool BoardGame::any_move(const Board& board, Player) const {
  return std::find(board.begin(), board.end(), 0) != board.end();
}

std::vector<Action> BoardGame::legal_actions(const GameState& s) const {
  std::vector<Action> out;
  if (s.is_terminal()) return out;
  gen_moves(s.board, s.mover, out);
  return out;
}

bool BoardGame::is_legal(const GameState& s, const Action& a) const {
  return !s.is_terminal() && a.from == -1 && a.to >= 0 &&
         a.to < cell_count() && s.board[a.to] == 0;
}

void BoardGame::edit_board(Board& board, const Action& a, Player mover) const {
  board[a.to] = static_cast<std::int8_t>(mover);
}

GameState BoardGame::apply(const GameState& s, const Action& a) const {
  if (!is_legal(s, a)) {
    throw std::invalid_argument("apply: illegal action in " + name_);
  }
  GameState n;
  n.board = s.board;
  edit_board(n.board, a, s.mover);
  n.ply = s.ply + 1;
  n.mover = opponent(s.mover);
  Terminal t = move_result(n.board, a, s.mover);
  if (!t.over() && n.ply >= ply_cap_) t = draw_result();
  if (!t.over() && !any_move(n.board, n.mover)) t = no_move_result(n.mover);
  n.terminal = t;
  return n;
}

Terminal BoardGame::recompute_status(const GameState& s) const {
  Terminal t = scan_result(s.board);
  if (!t.over() && s.ply >= ply_cap_) t = draw_result();
  if (!t.over() && !any_move(s.board, s.mover)) t = no_move_result(s.mover);
  return t;
}

Terminal BoardGame::no_move_result(Player) const { return draw_result(); }

std::vector<std::pair<int, int>> BoardGame::pattern_offsets(Player p) const {
  if (p == kPlayer1) return kSquareOffsets;
  std::vector<std::pair<int, int>> out;
  out.reserve(kSquareOffsets.size());
  for (auto off : kSquareOffsets) out.push_back(mirror_offset(off));
  return out;
}

GameState BoardGame::mirror_state(const GameState& s) const {
  GameState m;
  m.board.assign(s.board.size(), 0);
  for (int cell = 0; cell < cell_count(); ++cell) {
    std::int8_t v = s.board[cell];
    m.board[mirror_cell(cell)] =
        v == 0 ? std::int8_t{0} : static_cast<std::int8_t>(3 - v);
  }
  m.mover = opponent(s.mover);
  m.ply = s.ply;
  m.terminal = s.terminal;
  if (m.terminal.kind == ResultKind::kWin) {
    m.terminal.winner = opponent(s.terminal.winner);
  }
  return m;
}

Action BoardGame::mirror_action(const Action& a) const {
  Action m = a;
  if (m.from >= 0) m.from = mirror_cell(m.from);
  m.to = mirror_cell(m.to);
  return m;
}

// ---------------------------------------------------------------- TicTacToe

TicTacToe::TicTacToe(int ply_cap) : BoardGame("tictactoe", 3, 3, ply_cap) {}

Terminal TicTacToe::move_result(const Board& board, const Action&,
                                Player) const {
  return scan_result(board);
}

Terminal TicTacToe::scan_result(const Board& board) const {
  static const int kLines[8][3] = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6},
                                   {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6}};
  for (const auto& line : kLines) {
    std::int8_t v = board[line[0]];
    if (v != 0 && v == board[line[1]] && v == board[line[2]]) {
      return win_for(v);
    }
  }
  return Terminal{};
}

// ---------------------------------------------------------------------- Hex

Hex::Hex(int size, int ply_cap)
    : BoardGame("hex" + std::to_string(size), size, size, ply_cap) {}

std::vector<std::pair<int, int>> Hex::pattern_offsets(Player p) const {
  if (p == kPlayer1) return kHexOffsets;
  std::vector<std::pair<int, int>> out;
  out.reserve(kHexOffsets.size());
  for (auto off : kHexOffsets) out.push_back(mirror_offset(off));
  return out;
}

std::pair<int, int> Hex::mirror_offset(std::pair<int, int> off) const {
  return {off.second, off.first};  // transpose
}

int Hex::mirror_cell(int cell) const {
  return (cell % cols_) * cols_ + cell / cols_;
}

bool Hex::connected(const Board& board, Player p) const {
  std::vector<int> stack;
  std::vector<char> seen(board.size(), 0);
  for (int i = 0; i < (p == kPlayer1 ? cols_ : rows_); ++i) {
    int cell = p == kPlayer1 ? i : i * cols_;
    if (board[cell] == p) {
      stack.push_back(cell);
      seen[cell] = 1;
    }
  }
  while (!stack.empty()) {
    int cell = stack.back();
    stack.pop_back();
    int r = cell / cols_, c = cell % cols_;
    if (p == kPlayer1 ? r == rows_ - 1 : c == cols_ - 1) return true;
    for (auto [dr, dc] : kHexOffsets) {
      int nr = r + dr, nc = c + dc;
      if (!in_bounds(nr, nc)) continue;
      int ncell = index(nr, nc);
      if (!seen[ncell] && board[ncell] == p) {
        seen[ncell] = 1;
        stack.push_back(ncell);
      }
    }
  }
  return false;
}

Terminal Hex::move_result(const Board& board, const Action&,
                          Player mover) const {
  if (connected(board, mover)) return win_for(mover);
  return Terminal{};
}

Terminal Hex::scan_result(const Board& board) const {
  if (connected(board, kPlayer1)) return win_for(kPlayer1);
  if (connected(board, kPlayer2)) return win_for(kPlayer2);
  return Terminal{};
}

// ------------------------------------------------------------------- Gomoku

Gomoku::Gomoku(int size, int run, int ply_cap)
    : BoardGame("gomoku" + std::to_string(size), size, size, ply_cap),
      run_(run) {}

Terminal Gomoku::move_result(const Board& board, const Action& a,
                             Player mover) const {
  static const int kDirs[4][2] = {{0, 1}, {1, 0}, {1, 1}, {1, -1}};
  int r0 = a.to / cols_, c0 = a.to % cols_;
  for (const auto& d : kDirs) {
    int count = 1;
    for (int sign : {1, -1}) {
      int r = r0 + sign * d[0], c = c0 + sign * d[1];
      while (in_bounds(r, c) && board[index(r, c)] == mover) {
        ++count;
        r += sign * d[0];
        c += sign * d[1];
      }
    }
    if (count >= run_) return win_for(mover);
  }
  return Terminal{};
}

Terminal Gomoku::scan_result(const Board& board) const {
  static const int kDirs[4][2] = {{0, 1}, {1, 0}, {1, 1}, {1, -1}};
  for (int cell = 0; cell < cell_count(); ++cell) {
    std::int8_t v = board[cell];
    if (v == 0) continue;
    int r0 = cell / cols_, c0 = cell % cols_;
    for (const auto& d : kDirs) {
      int pr = r0 - d[0], pc = c0 - d[1];
      if (in_bounds(pr, pc) && board[index(pr, pc)] == v) continue;
      int count = 0, r = r0, c = c0;
      while (in_bounds(r, c) && board[index(r, c)] == v) {
        ++count;
        r += d[0];
        c += d[1];
      }
      if (count >= run_) return win_for(v);
    }
  }
  return Terminal{};
}

// ------------------------------------------------------------- Breakthrough

Breakthrough::Breakthrough(int size, int ply_cap)
    : BoardGame("breakthrough" + std::to_string(size), size, size, ply_cap) {}

void Breakthrough::setup_board(Board& board) const {
  for (int c = 0; c < cols_; ++c) {
    board[index(0, c)] = 1;
    board[index(1, c)] = 1;
    board[index(rows_ - 2, c)] = 2;
    board[index(rows_ - 1, c)] = 2;
  }
}

void Breakthrough::gen_moves(const Board& board, Player mover,
                             std::vector<Action>& out) const {
  int fwd = forward(mover);
  for (int cell = 0; cell < cell_count(); ++cell) {
    if (board[cell] != mover) continue;
    int r = cell / cols_, c = cell % cols_;
    int nr = r + fwd;
    if (nr < 0 || nr >= rows_) continue;
    for (int dc = -1; dc <= 1; ++dc) {
      int nc = c + dc;
      if (nc < 0 || nc >= cols_) continue;
      std::int8_t target = board[index(nr, nc)];
      // straight needs an empty cell; diagonals may also capture
      if (dc == 0 ? target == 0 : target != mover) {
        out.push_back(Action{cell, index(nr, nc)});
      }
    }
  }
}

bool Breakthrough::any_move(const Board& board, Player mover) const {
  int fwd = forward(mover);
  for (int cell = 0; cell < cell_count(); ++cell) {
    if (board[cell] != mover) continue;
    int r = cell / cols_, c = cell % cols_;
    int nr = r + fwd;
    if (nr < 0 || nr >= rows_) continue;
    for (int dc = -1; dc <= 1; ++dc) {
      int nc = c + dc;
      if (nc < 0 || nc >= cols_) continue;
      std::int8_t target = board[index(nr, nc)];
      if (dc == 0 ? target == 0 : target != mover) return true;
    }
  }
  return false;
}

bool Breakthrough::is_legal(const GameState& s, const Action& a) const {
  if (s.is_terminal() || a.from < 0 || a.from >= cell_count() || a.to < 0 ||
      a.to >= cell_count()) {
    return false;
  }
  if (s.board[a.from] != s.mover) return false;
  int r = a.from / cols_, c = a.from % cols_;
  int nr = a.to / cols_, nc = a.to % cols_;
  if (nr != r + forward(s.mover) || std::abs(nc - c) > 1) return false;
  std::int8_t target = s.board[a.to];
  return nc == c ? target == 0 : target != s.mover;
}

void Breakthrough::edit_board(Board& board, const Action& a,
                              Player mover) const {
  board[a.from] = 0;
  board[a.to] = static_cast<std::int8_t>(mover);
}

Terminal Breakthrough::move_result(const Board&, const Action& a,
                                   Player mover) const {
  if (a.to / cols_ == last_rank(mover)) return win_for(mover);
  return Terminal{};
}

Terminal Breakthrough::scan_result(const Board& board) const {
  for (int c = 0; c < cols_; ++c) {
    if (board[index(rows_ - 1, c)] == 1) return win_for(kPlayer1);
    if (board[index(0, c)] == 2) return win_for(kPlayer2);
  }
  return Terminal{};
}

Terminal Breakthrough::no_move_result(Player mover) const {
  return win_for(opponent(mover));
}

std::pair<int, int> Breakthrough::mirror_offset(std::pair<int, int> off) const {
  return {-off.first, off.second};  // vertical flip
}

int Breakthrough::mirror_cell(int cell) const {
  return index(rows_ - 1 - cell / cols_, cell % cols_);
}

std::vector<std::pair<int, int>> Breakthrough::origin_offsets(Player p) const {
  // Destination -> origin, listed forward-left, forward, forward-right in
  // the owner's frame.
  if (p == kPlayer1) return {{-1, -1}, {-1, 0}, {-1, 1}};
  return {{1, -1}, {1, 0}, {1, 1}};
}

// ------------------------------------------------------------------ factory

std::shared_ptr<const Game> make_game(const std::string& name) {
  if (name == "tictactoe") return std::make_shared<TicTacToe>();
  if (name == "hex5") return std::make_shared<Hex>(5);
  if (name == "hex7") return std::make_shared<Hex>(7);
  if (name == "gomoku9") return std::make_shared<Gomoku>(9);
  if (name == "breakthrough6") return std::make_shared<Breakthrough>(6);
  throw std::invalid_argument("unknown game: " + name);
}

std::vector<std::string> game_names() {
  return {"tictactoe", "hex5", "hex7", "gomoku9", "breakthrough6"};
}

}  // namespace exitlab
