#include <zdclone/monoid.hpp>

#include "budget_detail.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace zdclone {

std::string to_string(Cell c) {
  switch (c) {
    case Cell::zero: return "zero";
    case Cell::target_x: return "target_x";
    case Cell::target_y: return "target_y";
    case Cell::source_x: return "source_x";
    case Cell::source_y: return "source_y";
  }
  throw std::logic_error("Cell: bad value");
}

// --- partitions -------------------------------------------------------------

struct Partition::Impl {
  bool mod4 = true;
  std::optional<FinFun> classifier;

  // Custom partitions discover cell members by scanning upward; everything
  // below scan_pos has been classified into the caches.
  std::mutex mu;
  std::array<std::vector<Nat>, 5> members;
  Nat scan_pos = 0;

  Cell classify(const Nat& x) const {
    if (mod4) {
      if (x == 0) return Cell::zero;
      Nat r = x % 4;
      if (r == 1) return Cell::target_x;
      if (r == 2) return Cell::target_y;
      if (r == 3) return Cell::source_x;
      return Cell::source_y;
    }
    Nat code = (*classifier)(x);
    if (code > 4)
      throw std::invalid_argument("Partition: classifier returned " + to_string(code) +
                                  " at x = " + to_string(x) + " (cell codes are 0..4)");
    return static_cast<Cell>(static_cast<unsigned>(code));
  }

  // Grows the caches until cell c has at least `needed` members.
  void grow(Cell c, std::size_t needed) {
    auto& cell = members[static_cast<std::size_t>(c)];
    while (cell.size() < needed) {
      detail::spend_step("enumerating a partition cell");
      Cell at = classify(scan_pos);
      members[static_cast<std::size_t>(at)].push_back(scan_pos);
      ++scan_pos;
    }
  }
};

Partition::Partition(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}

Partition Partition::mod4() {
  auto im = std::make_shared<Impl>();
  im->mod4 = true;
  return Partition(std::move(im));
}

Partition Partition::custom(FinFun classifier) {
  if (classifier.arity() != 1)
    throw std::invalid_argument("Partition::custom: classifier must be unary");
  auto im = std::make_shared<Impl>();
  im->mod4 = false;
  im->classifier = std::move(classifier);
  if (im->classify(0) != Cell::zero)
    throw std::invalid_argument("Partition::custom: the classifier must place 0 in cell zero");
  return Partition(std::move(im));
}

Cell Partition::cell_of(const Nat& x) const { return impl_->classify(x); }

Nat Partition::nth_element(Cell c, std::size_t idx) const {
  Impl& im = *impl_;
  if (im.mod4) {
    // Closed forms: zero = {0}; the residue cells are arithmetic
    // progressions 4j + r.
    switch (c) {
      case Cell::zero:
        if (idx > 0) throw std::out_of_range("Partition: the zero cell has a single element");
        return 0;
      case Cell::target_x: return Nat(4) * idx + 1;
      case Cell::target_y: return Nat(4) * idx + 2;
      case Cell::source_x: return Nat(4) * idx + 3;
      case Cell::source_y: return Nat(4) * idx + 4;
    }
    throw std::logic_error("Cell: bad value");
  }
  detail::BudgetScope budget;
  std::lock_guard<std::mutex> lock(im.mu);
  im.grow(c, idx + 1);
  return im.members[static_cast<std::size_t>(c)][idx];
}

Nat Partition::count_below(Cell c, const Nat& horizon) const {
  Impl& im = *impl_;
  if (im.mod4) {
    switch (c) {
      case Cell::zero: return horizon > 0 ? 1 : 0;
      case Cell::target_x: return horizon > 1 ? Nat((horizon - 2) / 4 + 1) : Nat(0);
      case Cell::target_y: return horizon > 2 ? Nat((horizon - 3) / 4 + 1) : Nat(0);
      case Cell::source_x: return horizon > 3 ? Nat((horizon - 4) / 4 + 1) : Nat(0);
      case Cell::source_y: return horizon > 4 ? Nat((horizon - 5) / 4 + 1) : Nat(0);
    }
    throw std::logic_error("Cell: bad value");
  }
  detail::BudgetScope budget;
  std::lock_guard<std::mutex> lock(im.mu);
  Nat count = 0;
  std::size_t cell = static_cast<std::size_t>(c);
  while (im.scan_pos < horizon) {
    detail::spend_step("enumerating a partition cell");
    Cell at = im.classify(im.scan_pos);
    im.members[static_cast<std::size_t>(at)].push_back(im.scan_pos);
    ++im.scan_pos;
  }
  for (const Nat& x : im.members[cell]) {
    if (x >= horizon) break;
    ++count;
  }
  return count;
}

// --- instruction trees --------------------------------------------------------

namespace {

class TreeParser {
 public:
  explicit TreeParser(const std::string& text) : text_(text) {}

  PairTree parse() {
    expect_word("zdclone-tree");
    expect_word("v1");
    skip_ws();
    expect('(');
    expect_word("root");
    PairTree tree;
    skip_ws();
    while (pos_ < text_.size() && text_[pos_] == '(') tree.roots.push_back(parse_node());
    expect(')');
    skip_ws();
    if (pos_ != text_.size()) fail("trailing text after the tree");
    return tree;
  }

 private:
  PairTree::Node parse_node() {
    expect('(');
    PairTree::Node node;
    node.ix = parse_nat_token();
    node.iy = parse_nat_token();
    skip_ws();
    while (pos_ < text_.size() && text_[pos_] == '(') node.children.push_back(parse_node());
    expect(')');
    skip_ws();
    return node;
  }

  Nat parse_nat_token() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected a number");
    return parse_nat(text_.substr(start, pos_ - start));
  }

  void expect(char ch) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != ch)
      fail(std::string("expected '") + ch + "'");
    ++pos_;
  }

  void expect_word(const std::string& word) {
    skip_ws();
    if (text_.compare(pos_, word.size(), word) != 0) fail("expected '" + word + "'");
    pos_ += word.size();
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("tree parse error at offset " + std::to_string(pos_) + ": " +
                                what);
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

void print_node(std::ostringstream& out, const PairTree::Node& node) {
  out << '(' << node.ix.str() << ' ' << node.iy.str();
  for (const auto& child : node.children) {
    out << ' ';
    print_node(out, child);
  }
  out << ')';
}

void collect_branches(const PairTree::Node& node, std::vector<std::pair<Nat, Nat>>& path,
                      std::vector<std::vector<std::pair<Nat, Nat>>>& out) {
  path.emplace_back(node.ix, node.iy);
  if (node.children.empty()) {
    out.push_back(path);
  } else {
    for (const auto& child : node.children) collect_branches(child, path, out);
  }
  path.pop_back();
}

}  // namespace

PairTree PairTree::parse(const std::string& text) { return TreeParser(text).parse(); }

std::string PairTree::to_text() const {
  std::ostringstream out;
  out << "zdclone-tree v1\n(root";
  for (const Node& root : roots) {
    out << ' ';
    print_node(out, root);
  }
  out << ")\n";
  return out.str();
}

PairTree PairTree::single_branch(std::size_t depth) {
  PairTree tree;
  if (depth == 0) return tree;
  Node node;
  node.ix = depth - 1;
  node.iy = depth - 1;
  for (std::size_t level = depth - 1; level-- > 0;) {
    Node parent;
    parent.ix = level;
    parent.iy = level;
    parent.children.push_back(std::move(node));
    node = std::move(parent);
  }
  tree.roots.push_back(std::move(node));
  return tree;
}

PairTree PairTree::full_binary(std::size_t depth) {
  PairTree tree;
  if (depth == 0) return tree;
  // Build one level at a time from the leaves upward: every node is
  // labelled (0,0) or (1,1) and has both kinds as children until the
  // deepest level.
  std::vector<Node> level(2);
  level[0].ix = 0;
  level[0].iy = 0;
  level[1].ix = 1;
  level[1].iy = 1;
  for (std::size_t d = 1; d < depth; ++d) {
    std::vector<Node> next(2);
    next[0].ix = 0;
    next[0].iy = 0;
    next[1].ix = 1;
    next[1].iy = 1;
    next[0].children = level;
    next[1].children = level;
    level = std::move(next);
  }
  tree.roots = std::move(level);
  return tree;
}

std::vector<std::vector<std::pair<Nat, Nat>>> PairTree::branches() const {
  std::vector<std::vector<std::pair<Nat, Nat>>> out;
  std::vector<std::pair<Nat, Nat>> path;
  for (const Node& root : roots) collect_branches(root, path, out);
  return out;
}

// --- the monoid -----------------------------------------------------------------

namespace {

std::uint32_t to_u32(const Nat& x) { return static_cast<std::uint32_t>(x); }

}  // namespace

MonoidBuild build_monoid(const Partition& partition, const PairTree& tree, const Nat& n) {
  if (n < 8) throw std::invalid_argument("build_monoid: n must be at least 8");
  if (n > (Nat(1) << 22))
    throw std::invalid_argument("build_monoid: n above 2^22 would need outsized value caches");
  detail::BudgetScope budget;

  // The partition must behave like the contract says on [0, n): the zero
  // cell is exactly {0} and every working cell is populous.
  if (partition.count_below(Cell::zero, n) != 1)
    throw std::invalid_argument("build_monoid: the zero cell must be exactly {0} below n");
  for (Cell c : {Cell::target_x, Cell::target_y, Cell::source_x, Cell::source_y}) {
    if (partition.count_below(c, n) * 8 < n)
      throw std::invalid_argument("build_monoid: cell " + to_string(c) +
                                  " holds fewer than n/8 points below n");
  }

  std::size_t size = static_cast<std::size_t>(n);
  auto target = [&](Cell cell, const Nat& idx, const std::string& name) -> std::uint32_t {
    if (idx > size)  // nth_element would walk far past the cache for nothing
      throw std::invalid_argument("build_monoid: label " + to_string(idx) + " in " + name +
                                  " is beyond the cache horizon");
    Nat value = partition.nth_element(cell, static_cast<std::size_t>(idx));
    if (value >= n)
      throw std::invalid_argument("build_monoid: the " + to_string(idx) + "-th element of " +
                                  to_string(cell) + " is " + to_string(value) +
                                  ", which reaches the cache horizon " + to_string(n) +
                                  " (element " + name + ")");
    return to_u32(value);
  };

  MonoidBuild build;
  build.n = n;

  std::vector<Cell> cells(size);
  for (std::size_t x = 0; x < size; ++x) cells[x] = partition.cell_of(Nat(x));

  MonoidElement id;
  id.kind = MonoidElement::Kind::identity;
  id.name = "id";
  id.values.resize(size);
  std::iota(id.values.begin(), id.values.end(), std::uint32_t(0));

  MonoidElement collapse;
  collapse.kind = MonoidElement::Kind::collapse;
  collapse.name = "h";
  collapse.values.resize(size);
  for (std::size_t x = 0; x < size; ++x)
    collapse.values[x] = cells[x] == Cell::source_y ? 0 : static_cast<std::uint32_t>(x);

  build.elements.push_back(std::move(id));
  build.elements.push_back(std::move(collapse));

  auto branches = tree.branches();
  std::vector<MonoidElement> collapsed;
  collapsed.reserve(branches.size());
  for (std::size_t b = 0; b < branches.size(); ++b) {
    const auto& labels = branches[b];
    std::string name = "f" + std::to_string(b + 1);

    MonoidElement f;
    f.kind = MonoidElement::Kind::branch;
    f.name = name;
    f.labels = labels;
    f.values.resize(size);

    MonoidElement g;
    g.kind = MonoidElement::Kind::branch_collapse;
    g.name = name + "*h";
    g.labels = labels;
    g.values.resize(size);

    std::size_t seen_x = 0;
    std::size_t seen_y = 0;
    for (std::size_t x = 0; x < size; ++x) {
      std::uint32_t fx;
      std::uint32_t gx;
      switch (cells[x]) {
        case Cell::source_x: {
          Nat idx = seen_x < labels.size() ? labels[seen_x].first : Nat(0);
          fx = target(Cell::target_x, idx, name);
          gx = fx;
          ++seen_x;
          break;
        }
        case Cell::source_y: {
          Nat idx = seen_y < labels.size() ? labels[seen_y].second : Nat(0);
          fx = target(Cell::target_y, idx, name);
          gx = 0;
          ++seen_y;
          break;
        }
        default:
          fx = static_cast<std::uint32_t>(x);
          gx = fx;
          break;
      }
      f.values[x] = fx;
      g.values[x] = gx;
    }

    build.elements.push_back(std::move(f));
    collapsed.push_back(std::move(g));
  }
  for (auto& g : collapsed) build.elements.push_back(std::move(g));
  return build;
}

namespace {

std::string witness(const std::string& law, const std::string& who, std::size_t x,
                    std::uint32_t got, const std::string& expected) {
  std::ostringstream out;
  out << law << ": " << who << " at x = " << x << ": got " << got << ", expected " << expected;
  return out.str();
}

}  // namespace

MonoidLawReport verify_monoid_laws(const Partition& partition, const MonoidBuild& build) {
  MonoidLawReport report;
  const auto& elements = build.elements;
  if (elements.size() < 2 || elements[0].kind != MonoidElement::Kind::identity ||
      elements[1].kind != MonoidElement::Kind::collapse)
    throw std::invalid_argument("verify_monoid_laws: expected [id, h, ...] element order");

  std::size_t size = static_cast<std::size_t>(build.n);
  std::vector<Cell> cells(size);
  for (std::size_t x = 0; x < size; ++x) cells[x] = partition.cell_of(Nat(x));

  auto note = [&report](std::string text) {
    if (report.detail.empty()) report.detail = std::move(text);
  };

  // Law (0): every element has the shape its kind prescribes.
  report.shapes_ok = true;
  for (const MonoidElement& el : elements) {
    for (std::size_t x = 0; x < size && report.shapes_ok; ++x) {
      std::uint32_t v = el.values[x];
      bool ok = true;
      std::string expected;
      switch (el.kind) {
        case MonoidElement::Kind::identity:
          ok = v == x;
          expected = "x itself";
          break;
        case MonoidElement::Kind::collapse:
          ok = cells[x] == Cell::source_y ? v == 0 : v == x;
          expected = cells[x] == Cell::source_y ? "0" : "x itself";
          break;
        case MonoidElement::Kind::branch:
          switch (cells[x]) {
            case Cell::source_x: ok = cells[v] == Cell::target_x; expected = "a target_x value"; break;
            case Cell::source_y: ok = cells[v] == Cell::target_y; expected = "a target_y value"; break;
            default: ok = v == x; expected = "x itself"; break;
          }
          break;
        case MonoidElement::Kind::branch_collapse:
          switch (cells[x]) {
            case Cell::source_x: ok = cells[v] == Cell::target_x; expected = "a target_x value"; break;
            case Cell::source_y: ok = v == 0; expected = "0"; break;
            default: ok = v == x; expected = "x itself"; break;
          }
          break;
      }
      if (!ok) {
        report.shapes_ok = false;
        note(witness("law (0)", el.name, x, v, expected));
      }
    }
    if (!report.shapes_ok) break;
  }

  // Split the family for the branch laws.
  std::vector<const MonoidElement*> branch_fs;
  std::vector<const MonoidElement*> branch_gs;
  for (const MonoidElement& el : elements) {
    if (el.kind == MonoidElement::Kind::branch) branch_fs.push_back(&el);
    if (el.kind == MonoidElement::Kind::branch_collapse) branch_gs.push_back(&el);
  }
  const MonoidElement& id = elements[0];
  const MonoidElement& h = elements[1];

  // Law (i): f o f' = f' whenever f' is branch-derived (f may be id too).
  report.absorption_ok = true;
  for (const MonoidElement* fp : branch_fs) {
    for (std::size_t x = 0; x < size && report.absorption_ok; ++x) {
      std::uint32_t through = (*fp)(x);
      for (const MonoidElement* f : branch_fs) {
        if ((*f)(through) != through) {
          report.absorption_ok = false;
          note(witness("law (i)", f->name + " o " + fp->name, x, (*f)(through),
                       fp->name + "(x) = " + std::to_string(through)));
          break;
        }
      }
      if (report.absorption_ok && id(through) != through) {
        report.absorption_ok = false;
        note(witness("law (i)", "id o " + fp->name, x, id(through), std::to_string(through)));
      }
    }
    if (!report.absorption_ok) break;
  }

  // Law (ii): h o f = f for branch-derived f.
  report.collapse_left_ok = true;
  for (const MonoidElement* f : branch_fs) {
    for (std::size_t x = 0; x < size; ++x) {
      std::uint32_t v = (*f)(x);
      if (h(v) != v) {
        report.collapse_left_ok = false;
        note(witness("law (ii)", "h o " + f->name, x, h(v), std::to_string(v)));
        break;
      }
    }
    if (!report.collapse_left_ok) break;
  }

  // Law (iii): f o h equals the recorded branch-collapse of the same branch.
  report.collapse_match_ok = branch_fs.size() == branch_gs.size();
  if (!report.collapse_match_ok) note("law (iii): mismatched branch and collapse counts");
  for (std::size_t b = 0; b < branch_fs.size() && report.collapse_match_ok; ++b) {
    const MonoidElement& f = *branch_fs[b];
    const MonoidElement& g = *branch_gs[b];
    for (std::size_t x = 0; x < size; ++x) {
      std::uint32_t composed = f(h(x));
      if (composed != g(x)) {
        report.collapse_match_ok = false;
        note(witness("law (iii)", f.name + " o h vs " + g.name, x, composed,
                     std::to_string(g(x))));
        break;
      }
    }
  }

  // Law (iv): every pairwise composite is pointwise equal to some element.
  std::map<std::vector<std::uint32_t>, const MonoidElement*> family;
  for (const MonoidElement& el : elements) family.emplace(el.values, &el);

  report.closure_ok = true;
  std::vector<std::uint32_t> composite(size);
  for (const MonoidElement& outer : elements) {
    for (const MonoidElement& inner : elements) {
      for (std::size_t x = 0; x < size; ++x) composite[x] = outer(inner(x));
      ++report.composites_checked;
      if (family.find(composite) == family.end()) {
        report.closure_ok = false;
        note("law (iv): " + outer.name + " o " + inner.name +
             " is not pointwise equal to any family element");
        break;
      }
    }
    if (!report.closure_ok) break;
  }

  return report;
}

}  // namespace zdclone
