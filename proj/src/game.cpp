#include "exitlab/game.hpp"

#include <sstream>
#include <stdexcept>

namespace exitlab {

Outcome Game::utilities(const GameState& s) const {
  if (!s.is_terminal()) {
    throw std::invalid_argument("utilities: state is not terminal");
  }
  if (s.terminal.kind == ResultKind::kDraw) return Outcome::draw();
  return Outcome::win(s.terminal.winner);
}

std::string serialize_state(const Game& game, const GameState& s) {
  std::string board;
  board.reserve(s.board.size());
  for (std::int8_t c : s.board) {
    board.push_back(c == 0 ? '.' : (c == 1 ? 'x' : 'o'));
  }
  std::ostringstream out;
  out << game.name() << ' ' << board << ' ' << s.mover << ' ' << s.ply;
  return out.str();
}

GameState deserialize_state(const Game& game, const std::string& line) {
  std::istringstream in(line);
  std::string name, board;
  int mover = 0, ply = -1;
  if (!(in >> name >> board >> mover >> ply)) {
    throw std::invalid_argument("deserialize_state: malformed line: " + line);
  }
  if (name != game.name()) {
    throw std::invalid_argument("deserialize_state: expected game '" +
                                game.name() + "', got '" + name + "'");
  }
  if (static_cast<int>(board.size()) != game.cell_count()) {
    throw std::invalid_argument("deserialize_state: bad board length");
  }
  if ((mover != kPlayer1 && mover != kPlayer2) || ply < 0) {
    throw std::invalid_argument("deserialize_state: bad mover or ply");
  }
  GameState s;
  s.board.resize(board.size());
  for (std::size_t i = 0; i < board.size(); ++i) {
    switch (board[i]) {
      case '.': s.board[i] = 0; break;
      case 'x': s.board[i] = 1; break;
      case 'o': s.board[i] = 2; break;
      default:
        throw std::invalid_argument("deserialize_state: bad board char");
    }
  }
  s.mover = mover;
  s.ply = ply;
  s.terminal = game.recompute_status(s);
  return s;
}

}  // namespace exitlab
