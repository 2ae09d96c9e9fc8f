#include <algorithm>
#include <set>

#include "sbck/syntax.hpp"

namespace sbck {

namespace {

void collect_labels(const Behaviour& b, std::set<std::string>& out) {
  switch (b.kind()) {
    case Kind::Success:
    case Kind::Var:
      return;
    case Kind::Rec:
      collect_labels(b.body(), out);
      return;
    case Kind::External:
    case Kind::Internal:
      for (const auto& br : b.branches()) {
        out.insert(br.label);
        collect_labels(br.next, out);
      }
      return;
  }
}

class Printer {
public:
  std::string run(const Behaviour& b) {
    term(b, true);
    return std::move(out_);
  }

private:
  // `top` is false right after `name.`, where an unparenthesised sum would
  // swallow the enclosing choice's remaining branches.
  void term(const Behaviour& b, bool top) {
    switch (b.kind()) {
      case Kind::Success:
        out_ += '1';
        return;
      case Kind::Var: {
        std::size_t i = b.index();
        out_ += i < names_.size() ? names_[names_.size() - 1 - i] : "?" + std::to_string(i);
        return;
      }
      case Kind::Rec: {
        Behaviour body = b.body();
        std::string name = fresh(b.hint(), body);
        out_ += "rec " + name + ". ";
        names_.push_back(std::move(name));
        term(body, top);
        names_.pop_back();
        return;
      }
      case Kind::External:
      case Kind::Internal:
        if (b.checkpointed()) {
          out_ += "^(";
          sum(b);
          out_ += ')';
        } else if (top || b.branches().size() == 1) {
          sum(b);
        } else {
          out_ += '(';
          sum(b);
          out_ += ')';
        }
        return;
    }
  }

  void sum(const Behaviour& b) {
    bool output = b.kind() == Kind::Internal;
    bool first = true;
    for (const auto& br : b.branches()) {
      if (!first) out_ += output ? " (+) " : " + ";
      first = false;
      if (output) out_ += '!';
      out_ += br.label;
      if (!br.next.is_success()) {
        out_ += '.';
        term(br.next, false);
      }
    }
  }

  // A binder name must not capture an enclosing variable and must not
  // coincide with a label in its scope, which would reparse as a variable.
  std::string fresh(const std::string& hint, const Behaviour& body) {
    std::set<std::string> labels;
    collect_labels(body, labels);
    std::string base = is_valid_name(hint) ? hint : "x";
    auto taken = [&](const std::string& n) {
      return labels.count(n) != 0 || std::find(names_.begin(), names_.end(), n) != names_.end();
    };
    if (!taken(base)) return base;
    for (std::size_t k = 1;; ++k) {
      std::string candidate = base + std::to_string(k);
      if (!taken(candidate)) return candidate;
    }
  }

  std::string out_;
  std::vector<std::string> names_;
};

}  // namespace

std::string render(const Behaviour& b) { return Printer().run(b); }

}  // namespace sbck
