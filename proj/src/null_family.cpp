#include "carnot/rademacher.hpp"

namespace carnot {

std::string to_string(BorelSet::Kind k) {
  switch (k) {
    case BorelSet::Kind::Point: return "point";
    case BorelSet::Kind::Affine: return "affine";
    case BorelSet::Kind::Ball: return "ball";
  }
  return "point";
}

bool default_membership(const DirectSystem& sys, int level, const BorelSet& b) {
  const int dim = sys.group(level)->dim();
  switch (b.kind) {
    case BorelSet::Kind::Point: return dim >= 1;
    case BorelSet::Kind::Affine: return b.codim >= 1;
    case BorelSet::Kind::Ball: return is_zero(b.radius);
  }
  return false;
}

namespace {

std::string describe(const ColimitElement& x) {
  std::string s = "[level " + std::to_string(x.level) + ":";
  for (std::size_t i = 0; i < x.rep.coords.size(); ++i) s += (i ? "," : "") + to_string(x.rep.coords[i]);
  return s + "]";
}

Obligation make_obligation(int level, int base, const ColimitElement& shift) {
  return {level, base, shift,
          "phi_" + std::to_string(level) + "^-1((q " + describe(shift) + ") B_" + std::to_string(base) + ") null at level " +
              std::to_string(level) + " for every q"};
}

}  // namespace

NullFamily::NullFamily(std::shared_ptr<const DirectSystem> sys, MembershipHook hook)
    : sys_(std::move(sys)), hook_(std::move(hook)) {
  if (!sys_) fail(ErrorKind::Validation, "null family without a system");
  items_.push_back({});
  obligations_.push_back({});
}

const NullDescriptor& NullFamily::at(int id) const {
  if (id < 0 || id >= static_cast<int>(items_.size())) fail(ErrorKind::Validation, "unknown descriptor " + std::to_string(id));
  return items_[static_cast<std::size_t>(id)];
}

std::vector<Obligation> NullFamily::obligations(int id) const {
  at(id);
  return obligations_[static_cast<std::size_t>(id)];
}

int NullFamily::add_cylinder(int level, const BorelSet& b, const ColimitElement& t) {
  if (level < 1 || level > sys_->size()) fail(ErrorKind::Validation, "cylinder level " + std::to_string(level) + " out of range");
  const int dim = sys_->group(level)->dim();
  if (static_cast<int>(b.center.size()) != dim)
    fail(ErrorKind::Validation, "borel set center has " + std::to_string(b.center.size()) + " coordinates, level has " + std::to_string(dim));
  if (b.kind == BorelSet::Kind::Affine && (b.codim < 0 || b.codim > dim)) fail(ErrorKind::Validation, "affine codimension out of range");
  if (b.kind == BorelSet::Kind::Ball && sgn(b.radius) < 0) fail(ErrorKind::Validation, "negative ball radius");
  if (t.level < 1 || t.level > sys_->size()) fail(ErrorKind::Validation, "translation level out of range");
  require_same_algebra(t.rep.algebra, sys_->group(t.level));
  if (!hook_(*sys_, level, b))
    fail(ErrorKind::Validation, to_string(b.kind) + " set is not null at level " + std::to_string(level));
  NullDescriptor d;
  d.kind = NullDescriptor::Kind::Cylinder;
  d.level = level;
  d.borel = b;
  d.translation = t;
  const int id = static_cast<int>(items_.size());
  items_.push_back(std::move(d));
  obligations_.push_back({make_obligation(level, id, t)});
  return id;
}

int NullFamily::add_union(const std::vector<int>& ids) {
  if (ids.empty()) fail(ErrorKind::Validation, "empty union");
  NullDescriptor d;
  d.kind = NullDescriptor::Kind::Union;
  std::vector<Obligation> obs;
  for (int id : ids) {
    at(id);
    if (!contains(id)) fail(ErrorKind::Validation, "union part " + std::to_string(id) + " is not in the family");
    d.parts.push_back(id);
    for (const auto& o : obligations_[static_cast<std::size_t>(id)]) obs.push_back(o);
  }
  items_.push_back(std::move(d));
  obligations_.push_back(std::move(obs));
  return static_cast<int>(items_.size()) - 1;
}

int NullFamily::add_subset(int parent, const std::string& constraint) {
  at(parent);
  if (!contains(parent)) fail(ErrorKind::Validation, "subset of a set outside the family");
  NullDescriptor d;
  d.kind = NullDescriptor::Kind::Subset;
  d.parts = {parent};
  d.constraint = constraint;
  items_.push_back(std::move(d));
  obligations_.push_back(obligations_[static_cast<std::size_t>(parent)]);
  return static_cast<int>(items_.size()) - 1;
}

int NullFamily::translate(const ColimitElement& g, int id) {
  const NullDescriptor src = at(id);
  int rewritten = 0;
  switch (src.kind) {
    case NullDescriptor::Kind::Empty: rewritten = empty_set; break;
    case NullDescriptor::Kind::Cylinder:
      rewritten = add_cylinder(src.level, src.borel, colimit_mul(*sys_, g, *src.translation));
      break;
    case NullDescriptor::Kind::Union: {
      std::vector<int> parts;
      for (int p : src.parts) parts.push_back(items_[static_cast<std::size_t>(translate(g, p))].rewritten);
      rewritten = add_union(parts);
      break;
    }
    case NullDescriptor::Kind::Subset:
      rewritten = add_subset(items_[static_cast<std::size_t>(translate(g, src.parts[0]))].rewritten, src.constraint);
      break;
    case NullDescriptor::Kind::Translate: rewritten = items_[static_cast<std::size_t>(translate(g, src.rewritten))].rewritten; break;
  }
  NullDescriptor d;
  d.kind = NullDescriptor::Kind::Translate;
  d.parts = {id};
  d.by = g;
  d.rewritten = rewritten;
  items_.push_back(std::move(d));
  obligations_.push_back(obligations_[static_cast<std::size_t>(rewritten)]);
  return static_cast<int>(items_.size()) - 1;
}

bool NullFamily::derivable(int id, std::vector<int>& memo) const {
  int& m = memo[static_cast<std::size_t>(id)];
  if (m >= 0) return m == 1;
  const auto& d = items_[static_cast<std::size_t>(id)];
  bool ok = false;
  switch (d.kind) {
    case NullDescriptor::Kind::Empty: ok = true; break;
    case NullDescriptor::Kind::Cylinder: ok = hook_(*sys_, d.level, d.borel); break;
    case NullDescriptor::Kind::Union:
      ok = true;
      for (int p : d.parts) ok = ok && derivable(p, memo);
      break;
    case NullDescriptor::Kind::Subset: ok = derivable(d.parts[0], memo); break;
    case NullDescriptor::Kind::Translate: ok = derivable(d.parts[0], memo) && derivable(d.rewritten, memo); break;
  }
  m = ok ? 1 : 0;
  return ok;
}

bool NullFamily::contains(int id) const {
  at(id);
  std::vector<int> memo(items_.size(), -1);
  return derivable(id, memo);
}

AxiomReport NullFamily::check_axioms() const {
  AxiomReport rep;
  std::vector<int> memo(items_.size(), -1);
  rep.empty_member = items_[0].kind == NullDescriptor::Kind::Empty && derivable(0, memo);
  if (!rep.empty_member) rep.failures.push_back("the empty set is not a member");
  rep.union_closed = rep.subset_closed = rep.translation_stable = true;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const auto& d = items_[i];
    const int id = static_cast<int>(i);
    if (d.kind == NullDescriptor::Kind::Union) {
      std::size_t expected = 0;
      for (int p : d.parts) expected += obligations_[static_cast<std::size_t>(p)].size();
      if (!derivable(id, memo) || obligations_[i].size() != expected) {
        rep.union_closed = false;
        rep.failures.push_back("union " + std::to_string(id) + " is not a member");
      }
    } else if (d.kind == NullDescriptor::Kind::Subset) {
      if (!derivable(id, memo)) {
        rep.subset_closed = false;
        rep.failures.push_back("subset " + std::to_string(id) + " is not a member");
      }
    } else if (d.kind == NullDescriptor::Kind::Translate) {
      // g N rewritten: each obligation phi_i^-1((q s) B) of N becomes phi_i^-1((q g s) B).
      const auto& before = obligations_[static_cast<std::size_t>(d.parts[0])];
      const auto& after = obligations_[static_cast<std::size_t>(d.rewritten)];
      bool ok = derivable(id, memo) && before.size() == after.size();
      for (std::size_t k = 0; ok && k < before.size(); ++k) {
        ok = before[k].level == after[k].level &&
             colimit_equal(*sys_, colimit_mul(*sys_, *d.by, before[k].shift), after[k].shift) &&
             items_[static_cast<std::size_t>(before[k].base)].borel.kind == items_[static_cast<std::size_t>(after[k].base)].borel.kind;
      }
      if (!ok) {
        rep.translation_stable = false;
        rep.failures.push_back("translate " + std::to_string(id) + " does not match the rewritten obligations");
      }
    }
  }
  return rep;
}

LimitFamilyDescriptor assemble_limit_family(NullFamily& family, const std::vector<int>& members) {
  LimitFamilyDescriptor out;
  out.union_id = members.empty() ? NullFamily::empty_set : family.add_union(members);
  out.obligations = family.obligations(out.union_id);
  return out;
}

}  // namespace carnot
