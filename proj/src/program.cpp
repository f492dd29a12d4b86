#include "tbrilab/program.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace tbrilab {

const char* to_string(EventType t) {
  switch (t) {
    case EventType::Read: return "RD";
    case EventType::Write: return "WR";
    case EventType::LockAcquire: return "LA";
    case EventType::LockRelease: return "LR";
    case EventType::Spawn: return "SPAWN";
    case EventType::Join: return "JOIN";
    case EventType::Alloc: return "ALLOC";
    case EventType::Free: return "FREE";
  }
  return "?";
}

const char* to_string(LockMode m) {
  return m == LockMode::Exclusive ? "exclusive" : "reader";
}

std::optional<std::uint32_t> Program::pointee_index(std::string_view name) const {
  for (std::uint32_t i = 0; i < pointees.size(); ++i)
    if (pointees[i].name == name) return i;
  return std::nullopt;
}

std::optional<std::uint32_t> Program::lock_index(std::string_view name) const {
  for (std::uint32_t i = 0; i < locks.size(); ++i)
    if (locks[i].name == name) return i;
  return std::nullopt;
}

namespace {

struct Token {
  std::string text;
  int column = 0;
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    if (line[i] == '#') break;
    std::size_t start = i;
    if (line[i] == '{' || line[i] == '}') {
      ++i;
    } else {
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
             line[i] != '#' && line[i] != '{' && line[i] != '}')
        ++i;
    }
    out.push_back(Token{std::string(line.substr(start, i - start)), static_cast<int>(start + 1)});
  }
  return out;
}

[[noreturn]] void parse_fail_code(Errc code, int line, int column, const std::string& what) {
  std::ostringstream os;
  os << "parse error at " << line << ":" << column << ": " << what;
  fail(code, os.str());
}

[[noreturn]] void parse_fail(int line, int column, const std::string& what) {
  parse_fail_code(Errc::Parse, line, column, what);
}

std::uint64_t parse_number(const Token& tok, int line) {
  std::uint64_t v = 0;
  if (tok.text.empty()) parse_fail(line, tok.column, "expected a number");
  for (char c : tok.text) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      parse_fail(line, tok.column, "expected a number, got '" + tok.text + "'");
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

struct RawStmt {
  std::vector<Token> tokens;
  int line = 0;
};

struct RawThread {
  std::string name;
  int line = 0;
  std::vector<RawStmt> stmts;
};

}  // namespace

Program parse_program(std::string_view text) {
  Program p;
  std::vector<RawThread> raw_threads;
  RawThread* current = nullptr;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    auto toks = tokenize(line);
    if (toks.empty()) continue;
    const std::string& head = toks[0].text;

    if (current) {
      if (head == "}") {
        if (toks.size() != 1) parse_fail(line_no, toks[1].column, "unexpected token after '}'");
        current = nullptr;
        continue;
      }
      current->stmts.push_back(RawStmt{toks, line_no});
      continue;
    }

    if (head == "pointee") {
      if (toks.size() != 4 || toks[2].text != "size")
        parse_fail(line_no, toks[0].column, "expected: pointee <id> size <bytes>");
      if (p.pointee_index(toks[1].text)) parse_fail(line_no, toks[1].column, "duplicate pointee '" + toks[1].text + "'");
      std::uint64_t size = parse_number(toks[3], line_no);
      if (size == 0) parse_fail(line_no, toks[3].column, "pointee size must be >= 1");
      PointeeDecl d;
      d.name = toks[1].text;
      d.declared_size = size;
      d.padded_size = pad_pointee(size);
      d.granules = static_cast<std::uint32_t>(d.padded_size / kGranuleBytes);
      p.pointees.push_back(std::move(d));
    } else if (head == "lock") {
      if (toks.size() != 4 || toks[2].text != "kind")
        parse_fail(line_no, toks[0].column, "expected: lock <id> kind mutex|rwlock");
      if (p.lock_index(toks[1].text)) parse_fail(line_no, toks[1].column, "duplicate lock '" + toks[1].text + "'");
      LockKind kind;
      if (toks[3].text == "mutex") kind = LockKind::Mutex;
      else if (toks[3].text == "rwlock") kind = LockKind::RwLock;
      else parse_fail(line_no, toks[3].column, "lock kind must be mutex or rwlock");
      p.locks.push_back(LockDecl{toks[1].text, kind});
    } else if (head == "thread") {
      if (toks.size() < 3 || toks[2].text != "{")
        parse_fail(line_no, toks[0].column, "expected: thread <id> {");
      for (const auto& t : raw_threads)
        if (t.name == toks[1].text) parse_fail(line_no, toks[1].column, "duplicate thread '" + toks[1].text + "'");
      raw_threads.push_back(RawThread{toks[1].text, line_no, {}});
      current = &raw_threads.back();
      // single-line form: thread t { <one stmt> }
      if (toks.size() > 3) {
        std::vector<Token> rest(toks.begin() + 3, toks.end());
        bool closed = rest.back().text == "}";
        if (closed) rest.pop_back();
        if (!rest.empty()) current->stmts.push_back(RawStmt{rest, line_no});
        if (closed) current = nullptr;
      }
    } else {
      parse_fail(line_no, toks[0].column, "expected pointee/lock/thread declaration");
    }
  }
  if (current) parse_fail(line_no, 1, "unterminated thread block '" + current->name + "'");
  if (raw_threads.empty()) fail(Errc::Parse, "program declares no threads");

  // Thread numbering: main = 0, declared threads in declaration order.
  std::vector<const RawThread*> ordered;
  const RawThread* raw_main = nullptr;
  for (const auto& t : raw_threads) {
    if (t.name == "main") raw_main = &t;
    else ordered.push_back(&t);
  }
  if (ordered.empty()) fail(Errc::Parse, "program declares no child threads");
  p.explicit_main = raw_main != nullptr;
  p.thread_names.push_back("main");
  for (const auto* t : ordered) p.thread_names.push_back(t->name);
  p.threads.resize(p.thread_names.size());
  p.parent.assign(p.thread_names.size(), 0);

  auto thread_index = [&](std::string_view name) -> std::optional<ThreadId> {
    for (std::uint32_t i = 0; i < p.thread_names.size(); ++i)
      if (p.thread_names[i] == name) return i;
    return std::nullopt;
  };

  auto alias_index = [&](std::uint32_t pointee, const std::string& name) {
    for (std::uint32_t i = 0; i < p.aliases.size(); ++i)
      if (p.aliases[i].pointee == pointee && p.aliases[i].name == name) return i;
    p.aliases.push_back(AliasDecl{name, pointee});
    return static_cast<std::uint32_t>(p.aliases.size() - 1);
  };

  bool any_spawn_join = false;

  auto parse_stmt = [&](const RawStmt& raw) -> Stmt {
    const auto& toks = raw.tokens;
    const std::string& head = toks[0].text;
    Stmt s;
    s.line = raw.line;
    if (head == "acquire") {
      if (toks.size() < 2 || toks.size() > 3)
        parse_fail(raw.line, toks[0].column, "expected: acquire <lock> [read|write]");
      auto li = p.lock_index(toks[1].text);
      if (!li) parse_fail(raw.line, toks[1].column, "undeclared lock '" + toks[1].text + "'");
      s.kind = StmtKind::Acquire;
      s.lock = *li;
      s.mode = LockMode::Exclusive;  // default acquire mode is write
      if (toks.size() == 3) {
        if (toks[2].text == "read") s.mode = LockMode::Reader;
        else if (toks[2].text == "write") s.mode = LockMode::Exclusive;
        else parse_fail(raw.line, toks[2].column, "acquire mode must be read or write");
      }
      if (p.locks[s.lock].kind == LockKind::Mutex && s.mode == LockMode::Reader)
        parse_fail(raw.line, toks[2].column, "a mutex only permits exclusive acquisition");
    } else if (head == "release") {
      if (toks.size() != 2) parse_fail(raw.line, toks[0].column, "expected: release <lock>");
      auto li = p.lock_index(toks[1].text);
      if (!li) parse_fail(raw.line, toks[1].column, "undeclared lock '" + toks[1].text + "'");
      s.kind = StmtKind::Release;
      s.lock = *li;
    } else if (head == "read" || head == "write") {
      if (toks.size() != 2 && !(toks.size() == 4 && toks[2].text == "via"))
        parse_fail(raw.line, toks[0].column, "expected: " + head + " <pointee>[+<offset>] [via <alias>]");
      std::string target = toks[1].text;
      std::uint64_t offset = 0;
      if (auto plus = target.find('+'); plus != std::string::npos) {
        Token off_tok{target.substr(plus + 1), toks[1].column + static_cast<int>(plus) + 1};
        offset = parse_number(off_tok, raw.line);
        target = target.substr(0, plus);
      }
      auto pi = p.pointee_index(target);
      if (!pi) parse_fail(raw.line, toks[1].column, "undeclared pointee '" + target + "'");
      if (offset >= p.pointees[*pi].declared_size)
        parse_fail_code(Errc::OffsetOutOfRange, raw.line, toks[1].column,
                        "offset " + std::to_string(offset) + " out of range for '" + target +
                            "' (size " + std::to_string(p.pointees[*pi].declared_size) + ")");
      s.kind = head == "read" ? StmtKind::Read : StmtKind::Write;
      s.pointee = *pi;
      s.offset = offset;
      s.alias = alias_index(*pi, toks.size() == 4 ? toks[3].text : std::string{});
    } else if (head == "spawn" || head == "join") {
      if (toks.size() != 2) parse_fail(raw.line, toks[0].column, "expected: " + head + " <thread>");
      auto ti = thread_index(toks[1].text);
      if (!ti) parse_fail(raw.line, toks[1].column, "undeclared thread '" + toks[1].text + "'");
      if (*ti == 0) parse_fail(raw.line, toks[1].column, "main cannot be spawned or joined");
      s.kind = head == "spawn" ? StmtKind::Spawn : StmtKind::Join;
      s.peer = *ti;
      any_spawn_join = true;
    } else {
      parse_fail(raw.line, toks[0].column, "unknown statement '" + head + "'");
    }
    return s;
  };

  for (const auto* raw : ordered) {
    ThreadId tid = *thread_index(raw->name);
    for (const auto& rs : raw->stmts) p.threads[tid].push_back(parse_stmt(rs));
  }
  if (raw_main) {
    for (const auto& rs : raw_main->stmts) p.threads[0].push_back(parse_stmt(rs));
  }

  if (any_spawn_join && !p.explicit_main)
    fail(Errc::Parse, "spawn/join statements require an explicit 'thread main' block");

  // Assemble main: implicit allocs first, frees last; default model spawns
  // all children at start and joins them at end, mirroring a parallel region.
  {
    std::vector<Stmt> head_stmts, tail_stmts;
    for (std::uint32_t pi = 0; pi < p.pointees.size(); ++pi) {
      Stmt a;
      a.kind = StmtKind::Alloc;
      a.pointee = pi;
      head_stmts.push_back(a);
      Stmt f;
      f.kind = StmtKind::Free;
      f.pointee = pi;
      tail_stmts.push_back(f);
    }
    if (!p.explicit_main) {
      for (ThreadId t = 1; t < p.thread_count(); ++t) {
        Stmt s;
        s.kind = StmtKind::Spawn;
        s.peer = t;
        head_stmts.push_back(s);
      }
      std::vector<Stmt> joins;
      for (ThreadId t = 1; t < p.thread_count(); ++t) {
        Stmt s;
        s.kind = StmtKind::Join;
        s.peer = t;
        joins.push_back(s);
      }
      tail_stmts.insert(tail_stmts.begin(), joins.begin(), joins.end());
    }
    std::vector<Stmt> main_stmts = std::move(head_stmts);
    main_stmts.insert(main_stmts.end(), p.threads[0].begin(), p.threads[0].end());
    main_stmts.insert(main_stmts.end(), tail_stmts.begin(), tail_stmts.end());
    p.threads[0] = std::move(main_stmts);
  }

  // Spawn/join structure: each child spawned exactly once, joined exactly once.
  {
    std::vector<int> spawned(p.thread_count(), 0), joined(p.thread_count(), 0);
    for (ThreadId t = 0; t < p.thread_count(); ++t) {
      for (const Stmt& s : p.threads[t]) {
        if (s.kind == StmtKind::Spawn) {
          if (s.peer == t) fail(Errc::Parse, "thread '" + p.thread_names[t] + "' spawns itself");
          if (++spawned[s.peer] > 1)
            fail(Errc::Parse, "thread '" + p.thread_names[s.peer] + "' spawned more than once");
          p.parent[s.peer] = t;
        } else if (s.kind == StmtKind::Join) {
          if (++joined[s.peer] > 1)
            fail(Errc::Parse, "thread '" + p.thread_names[s.peer] + "' joined more than once");
        }
      }
    }
    for (ThreadId t = 1; t < p.thread_count(); ++t) {
      if (!spawned[t]) fail(Errc::Parse, "thread '" + p.thread_names[t] + "' is never spawned");
      if (!joined[t]) fail(Errc::Parse, "thread '" + p.thread_names[t] + "' is never joined");
    }
  }

  // Lock discipline per thread: properly nested, no recursive acquire,
  // nothing held at thread end.
  for (ThreadId t = 0; t < p.thread_count(); ++t) {
    std::vector<std::uint32_t> stack;
    for (const Stmt& s : p.threads[t]) {
      if (s.kind == StmtKind::Acquire) {
        if (std::find(stack.begin(), stack.end(), s.lock) != stack.end())
          fail(Errc::RecursiveLock,
               "line " + std::to_string(s.line) + ": recursive acquire of '" + p.locks[s.lock].name + "'");
        stack.push_back(s.lock);
      } else if (s.kind == StmtKind::Release) {
        if (stack.empty() || stack.back() != s.lock)
          fail(Errc::UnmatchedRelease,
               "line " + std::to_string(s.line) + ": release of '" + p.locks[s.lock].name +
                   "' does not match the innermost held lock");
        stack.pop_back();
      }
    }
    if (!stack.empty())
      fail(Errc::UnmatchedAcquire, "thread '" + p.thread_names[t] + "' ends holding '" +
                                       p.locks[stack.back()].name + "'");
  }

  std::uint32_t total = 0;
  for (const auto& stmts : p.threads) total += static_cast<std::uint32_t>(stmts.size());
  p.total_events = total;
  return p;
}

std::vector<AliasInstance> instantiate_aliases(const Program& p) {
  std::set<AliasInstance> seen;
  for (ThreadId t = 0; t < p.thread_count(); ++t)
    for (const Stmt& s : p.threads[t])
      if (s.kind == StmtKind::Read || s.kind == StmtKind::Write)
        seen.insert(AliasInstance{s.alias, t});
  return {seen.begin(), seen.end()};
}

}  // namespace tbrilab
