#include "ontomerge/engine.hpp"

#include "ontomerge/error.hpp"

#include <algorithm>
#include <functional>

namespace ontomerge {

namespace {

constexpr std::size_t idx(FrameKind k) { return static_cast<std::size_t>(k); }

bool add_value(std::vector<Value>& values, Value v)
{
    if (std::find(values.begin(), values.end(), v) != values.end())
        return false;
    values.push_back(std::move(v));
    return true;
}

bool has_cycle(const Ontology& o)
{
    enum class Mark { None, Open, Done };
    std::map<std::string, Mark> mark;
    std::function<bool(const std::string&)> visit = [&](const std::string& name) {
        auto& m = mark[name];
        if (m == Mark::Open)
            return true;
        if (m == Mark::Done)
            return false;
        m = Mark::Open;
        if (const auto* c = o.find_class(name))
            for (const auto& s : c->superclasses)
                if (visit(s))
                    return true;
        mark[name] = Mark::Done;
        return false;
    };
    for (const auto& [name, cls] : o.classes())
        if (visit(name))
            return true;
    return false;
}

struct Participants {
    std::set<FrameId> pre;         // source frames involved
    std::set<FrameId> fresh;       // the subset that had no image before the operation
    std::set<std::string> merged;  // merged frames replaced by the result
};

class Applier {
public:
    Applier(const MergeSession& session, MergeSession::State& st, AppliedRecord& rec)
        : session_(session), st_(st), rec_(rec), m_(st.merged)
    {
    }

    std::optional<FrameId> run(const Operation& op)
    {
        auto result = std::visit([this](const auto& o) { return dispatch(o); }, op);
        for (const auto& a : arguments(op))
            if (!a.source.empty())
                rec_.touched.insert(a);
        finish();
        return result;
    }

private:
    const MergeSession& session_;
    MergeSession::State& st_;
    AppliedRecord& rec_;
    Ontology& m_;
    std::array<std::set<std::string>, 3> rewritten_;

    // ---- lookup ---------------------------------------------------------

    bool is_merged_ref(const FrameId& id) const { return id.source == m_.name(); }

    const Ontology& src(const std::string& name) const
    {
        if (const auto* o = session_.source(name))
            return *o;
        throw Error(ErrorCode::UnknownFrame, "no ontology named '" + name + "'");
    }

    bool source_has(FrameKind kind, const FrameId& id) const
    {
        const auto* o = session_.source(id.source);
        return o && o->contains(kind, id.name);
    }

    std::optional<std::string> img(FrameKind kind, const FrameId& id) const
    {
        const auto& map = st_.images[idx(kind)];
        auto it = map.find(id);
        if (it == map.end())
            return std::nullopt;
        return it->second;
    }

    std::vector<FrameId> preimages(FrameKind kind, const std::string& name) const
    {
        std::vector<FrameId> out;
        for (const auto& [from, to] : st_.images[idx(kind)])
            if (to == name)
                out.push_back(from);
        return out;
    }

    FrameId mid(const std::string& name) const { return m_.id(name); }

    /// Merged frame a reference denotes (itself, or the image of a source frame).
    std::string resolve_merged(FrameKind kind, const FrameId& ref) const
    {
        if (is_merged_ref(ref)) {
            if (!m_.contains(kind, ref.name))
                throw Error(ErrorCode::UnknownFrame, std::string(to_string(kind)) + " '" + ref.str() + "' does not exist");
            return ref.name;
        }
        if (!source_has(kind, ref))
            throw Error(ErrorCode::UnknownFrame, std::string(to_string(kind)) + " '" + ref.str() + "' does not exist");
        if (auto i = img(kind, ref))
            return *i;
        throw Error(ErrorCode::UnknownFrame, std::string(to_string(kind)) + " '" + ref.str() + "' has no image");
    }

    Participants gather(FrameKind kind, const FrameId& ref) const
    {
        Participants p;
        std::string target;
        if (is_merged_ref(ref)) {
            if (!m_.contains(kind, ref.name))
                throw Error(ErrorCode::UnknownFrame, std::string(to_string(kind)) + " '" + ref.str() + "' does not exist");
            target = ref.name;
        } else {
            if (!source_has(kind, ref))
                throw Error(ErrorCode::UnknownFrame, std::string(to_string(kind)) + " '" + ref.str() + "' does not exist");
            p.pre.insert(ref);
            if (auto i = img(kind, ref))
                target = *i;
            else
                p.fresh.insert(ref);
        }
        if (!target.empty()) {
            p.merged.insert(target);
            for (auto& pre : preimages(kind, target))
                p.pre.insert(std::move(pre));
        }
        return p;
    }

    // Source ontology used when a new name needs a suffix.
    std::string origin(const FrameId& ref, const Participants& p) const
    {
        if (!is_merged_ref(ref))
            return ref.source;
        return p.pre.empty() ? m_.name() : p.pre.begin()->source;
    }

    // ---- naming ---------------------------------------------------------

    bool taken(FrameKind kind, const std::string& name, const std::set<std::string>& free) const
    {
        return m_.contains(kind, name) && !free.contains(name);
    }

    std::string fresh_name(FrameKind kind, const std::string& base, const std::string& source,
                           const std::set<std::string>& free, bool force_suffix) const
    {
        if (!force_suffix && !taken(kind, base, free))
            return base;
        std::string suffixed = base + "_" + source;
        if (!taken(kind, suffixed, free))
            return suffixed;
        for (int i = 2;; ++i) {
            auto candidate = suffixed + "_" + std::to_string(i);
            if (!taken(kind, candidate, free))
                return candidate;
        }
    }

    bool copies_suffixed() const { return session_.config().suffix_policy == SuffixPolicy::AlwaysSuffix; }

    void check_new_name(FrameKind kind, const std::string& name) const
    {
        if (!is_ncname(name))
            throw Error(ErrorCode::InvalidArgument, "'" + name + "' is not a valid local name");
        if (kind == FrameKind::Class && name == kThing)
            throw Error(ErrorCode::InvalidArgument, "Thing is reserved for the top class");
    }

    std::string merge_name(FrameKind kind, const FrameId& a, const Participants& pa, const FrameId& b,
                           const std::optional<std::string>& requested, const std::set<std::string>& free) const
    {
        if (requested) {
            check_new_name(kind, *requested);
            if (taken(kind, *requested, free))
                throw Error(ErrorCode::NameCollision,
                            std::string(to_string(kind)) + " '" + *requested + "' already exists in the merged ontology");
            return *requested;
        }
        auto ba = session_.base_name(a.name);
        auto bb = session_.base_name(b.name);
        return fresh_name(kind, ba == bb ? ba : a.name, origin(a, pa), free, false);
    }

    // ---- reference maintenance -----------------------------------------

    void retarget_images(FrameKind kind, const std::string& from, const std::string& to)
    {
        for (auto& [pre, target] : st_.images[idx(kind)])
            if (target == from)
                target = to;
    }

    void rewrite_class(const std::string& from, const std::string& to)
    {
        if (from == to)
            return;
        for (auto& [name, cls] : m_.classes()) {
            if (cls.superclasses.erase(from)) {
                if (name != to)
                    cls.superclasses.insert(to);
                rewritten_[idx(FrameKind::Class)].insert(name);
            }
        }
        for (auto& [name, slot] : m_.slots()) {
            if (slot.domain.erase(from)) {
                slot.domain.insert(to);
                rewritten_[idx(FrameKind::Slot)].insert(name);
            }
            if (slot.is_object() && std::get<ClassSet>(slot.range).erase(from)) {
                std::get<ClassSet>(slot.range).insert(to);
                rewritten_[idx(FrameKind::Slot)].insert(name);
            }
        }
        for (auto& [name, inst] : m_.instances()) {
            if (inst.types.erase(from)) {
                inst.types.insert(to);
                rewritten_[idx(FrameKind::Instance)].insert(name);
            }
        }
        retarget_images(FrameKind::Class, from, to);
    }

    void rewrite_slot(const std::string& from, const std::string& to)
    {
        if (from == to)
            return;
        for (auto& [name, inst] : m_.instances()) {
            auto it = inst.values.find(from);
            if (it == inst.values.end())
                continue;
            auto moved = std::move(it->second);
            inst.values.erase(it);
            auto& target = inst.values[to];
            for (auto& v : moved)
                add_value(target, std::move(v));
            rewritten_[idx(FrameKind::Instance)].insert(name);
        }
        for (auto& mm : st_.mismatches)
            if (mm.slot == from)
                mm.slot = to;
        retarget_images(FrameKind::Slot, from, to);
    }

    void rewrite_instance(const std::string& from, const std::string& to)
    {
        if (from == to)
            return;
        for (auto& [name, inst] : m_.instances()) {
            bool changed = false;
            for (auto& [slot, values] : inst.values) {
                bool hit = false;
                for (const auto& v : values)
                    if (const auto* r = std::get_if<InstanceRef>(&v); r && r->name == from)
                        hit = true;
                if (!hit)
                    continue;
                std::vector<Value> next;
                for (auto& v : values) {
                    if (auto* r = std::get_if<InstanceRef>(&v); r && r->name == from)
                        r->name = to;
                    add_value(next, std::move(v));
                }
                values = std::move(next);
                changed = true;
            }
            if (changed)
                rewritten_[idx(FrameKind::Instance)].insert(name);
        }
        retarget_images(FrameKind::Instance, from, to);
    }

    void rewrite(FrameKind kind, const std::string& from, const std::string& to)
    {
        switch (kind) {
        case FrameKind::Class: rewrite_class(from, to); break;
        case FrameKind::Slot: rewrite_slot(from, to); break;
        case FrameKind::Instance: rewrite_instance(from, to); break;
        }
        auto& ex = st_.explicit_frames[idx(kind)];
        if (ex.erase(from))
            ex.insert(to);
    }

    void erase_frame(FrameKind kind, const std::string& name)
    {
        switch (kind) {
        case FrameKind::Class: m_.classes().erase(name); break;
        case FrameKind::Slot: m_.slots().erase(name); break;
        case FrameKind::Instance: m_.instances().erase(name); break;
        }
    }

    void drop_images_to(FrameKind kind, const std::string& name)
    {
        std::erase_if(st_.images[idx(kind)], [&](const auto& entry) { return entry.second == name; });
        st_.explicit_frames[idx(kind)].erase(name);
    }

    void scrub_class(const std::string& name)
    {
        for (auto& [n, cls] : m_.classes())
            if (cls.superclasses.erase(name))
                rewritten_[idx(FrameKind::Class)].insert(n);
        for (auto& [n, slot] : m_.slots()) {
            bool changed = slot.domain.erase(name) > 0;
            if (slot.is_object()) {
                auto& range = std::get<ClassSet>(slot.range);
                if (range.erase(name)) {
                    changed = true;
                    if (range.empty())
                        range.insert(std::string(kThing));
                }
            }
            if (changed)
                rewritten_[idx(FrameKind::Slot)].insert(n);
        }
        for (auto& [n, inst] : m_.instances())
            if (inst.types.erase(name))
                rewritten_[idx(FrameKind::Instance)].insert(n);
    }

    void scrub_slot(const std::string& name)
    {
        for (auto& [n, inst] : m_.instances())
            if (inst.values.erase(name))
                rewritten_[idx(FrameKind::Instance)].insert(n);
        std::erase_if(st_.mismatches, [&](const DatatypeMismatch& mm) { return mm.slot == name; });
    }

    void scrub_instance(const std::string& name)
    {
        for (auto& [n, inst] : m_.instances()) {
            bool changed = false;
            for (auto it = inst.values.begin(); it != inst.values.end();) {
                auto before = it->second.size();
                std::erase_if(it->second, [&](const Value& v) {
                    const auto* r = std::get_if<InstanceRef>(&v);
                    return r && r->name == name;
                });
                changed = changed || it->second.size() != before;
                it = it->second.empty() ? inst.values.erase(it) : std::next(it);
            }
            if (changed)
                rewritten_[idx(FrameKind::Instance)].insert(n);
        }
    }

    // ---- copying --------------------------------------------------------

    // Removes the Thing placeholder once a real range class is present, unless
    // some source slot behind the merged slot actually ranges over Thing.
    void drop_placeholder(const std::string& slot_name)
    {
        auto* slot = m_.find_slot(slot_name);
        if (!slot || !slot->is_object())
            return;
        auto& range = std::get<ClassSet>(slot->range);
        if (range.size() < 2 || !range.contains(std::string(kThing)))
            return;
        for (const auto& pre : preimages(FrameKind::Slot, slot_name)) {
            const auto* s = src(pre.source).find_slot(pre.name);
            if (s && s->is_object() && s->range_classes().contains(std::string(kThing)))
                return;
        }
        range.erase(std::string(kThing));
    }

    std::string ensure_slot_image(const FrameId& s)
    {
        if (auto i = img(FrameKind::Slot, s))
            return *i;
        const auto& o = src(s.source);
        const auto* sf = o.find_slot(s.name);
        if (!sf)
            throw Error(ErrorCode::UnknownFrame, "slot '" + s.str() + "' does not exist");
        SlotFrame copy;
        copy.name = fresh_name(FrameKind::Slot, s.name, s.source, {}, copies_suffixed());
        copy.kind = sf->kind;
        copy.card = sf->card;
        for (const auto& d : sf->domain)
            if (auto i = img(FrameKind::Class, o.id(d)))
                copy.domain.insert(*i);
        if (sf->is_object()) {
            ClassSet range;
            for (const auto& r : sf->range_classes()) {
                if (r == kThing)
                    range.insert(r);
                else if (auto i = img(FrameKind::Class, o.id(r)))
                    range.insert(*i);
            }
            if (range.empty())
                range.insert(std::string(kThing));
            copy.range = std::move(range);
        } else {
            copy.range = sf->range_kind();
        }
        auto name = copy.name;
        m_.add_slot(std::move(copy));
        st_.images[idx(FrameKind::Slot)][s] = name;
        rec_.created.push_back(mid(name));
        rec_.touched.insert(s);
        return name;
    }

    // Attaches the images of the source class's slots to `image`, and adds
    // `image` to the range of every imaged slot that ranges over the class.
    void carry_slots(const FrameId& cls, const std::string& image)
    {
        const auto& o = src(cls.source);
        for (const auto& slot : o.attached_slots(cls.name)) {
            auto si = ensure_slot_image(o.id(slot));
            m_.find_slot(si)->domain.insert(image);
        }
        for (const auto& [name, slot] : o.slots()) {
            if (!slot.is_object() || !slot.range_classes().contains(cls.name))
                continue;
            if (auto si = img(FrameKind::Slot, o.id(name))) {
                std::get<ClassSet>(m_.find_slot(*si)->range).insert(image);
                drop_placeholder(*si);
            }
        }
    }

    std::string shallow_copy(const FrameId& c)
    {
        if (is_merged_ref(c) || !source_has(FrameKind::Class, c))
            throw Error(ErrorCode::UnknownFrame, "class '" + c.str() + "' does not exist in a source ontology");
        if (auto i = img(FrameKind::Class, c))
            throw Error(ErrorCode::AlreadyImaged, "class '" + c.str() + "' already has image '" + *i + "'");
        const auto& o = src(c.source);
        ClassFrame copy;
        copy.name = fresh_name(FrameKind::Class, c.name, c.source, {}, copies_suffixed());
        for (const auto& s : o.find_class(c.name)->superclasses)
            if (auto i = img(FrameKind::Class, o.id(s)))
                copy.superclasses.insert(*i);
        auto name = copy.name;
        m_.add_class(std::move(copy));
        st_.images[idx(FrameKind::Class)][c] = name;
        rec_.created.push_back(mid(name));
        rec_.touched.insert(c);
        for (const auto& sub : o.subclasses(c.name))
            if (auto i = img(FrameKind::Class, o.id(sub)); i && *i != name)
                m_.find_class(*i)->superclasses.insert(name);
        carry_slots(c, name);
        return name;
    }

    std::string deep_copy(const FrameId& c)
    {
        auto name = shallow_copy(c);
        const auto& o = src(c.source);
        for (const auto& s : o.find_class(c.name)->superclasses)
            if (!img(FrameKind::Class, o.id(s)))
                deep_copy(o.id(s));
        return name;
    }

    // ---- merges ---------------------------------------------------------

    void mark(const Participants& p)
    {
        for (const auto& pre : p.pre)
            rec_.touched.insert(pre);
    }

    void check_distinct(FrameKind kind, const FrameId& a, const FrameId& b, const Participants& pa,
                        const Participants& pb) const
    {
        if (a == b)
            throw Error(ErrorCode::SameFrame, "cannot merge " + std::string(to_string(kind)) + " '" + a.str() + "' with itself");
        if (!pa.merged.empty() && pa.merged == pb.merged)
            throw Error(ErrorCode::SameFrame, "'" + a.str() + "' and '" + b.str() + "' already share the merged " +
                                                  std::string(to_string(kind)) + " '" + *pa.merged.begin() + "'");
    }

    void finish_merge(FrameKind kind, const std::string& name, const std::set<std::string>& replaced,
                      const std::set<FrameId>& pre)
    {
        bool was_explicit = pre.empty();
        for (const auto& d : replaced) {
            was_explicit = was_explicit || st_.explicit_frames[idx(kind)].contains(d);
            st_.explicit_frames[idx(kind)].erase(d);
            rec_.touched.insert(mid(d));
            if (d != name)
                rec_.deleted.push_back(mid(d));
        }
        for (const auto& p : pre)
            st_.images[idx(kind)][p] = name;
        if (was_explicit)
            st_.explicit_frames[idx(kind)].insert(name);
        if (std::find(rec_.created.begin(), rec_.created.end(), mid(name)) == rec_.created.end())
            rec_.created.push_back(mid(name));
    }

    std::string merge_classes(const FrameId& a, const FrameId& b, const std::optional<std::string>& requested)
    {
        auto pa = gather(FrameKind::Class, a);
        auto pb = gather(FrameKind::Class, b);
        check_distinct(FrameKind::Class, a, b, pa, pb);
        std::set<std::string> replaced = pa.merged;
        replaced.insert(pb.merged.begin(), pb.merged.end());
        std::set<FrameId> pre = pa.pre;
        pre.insert(pb.pre.begin(), pb.pre.end());
        mark(pa);
        mark(pb);

        ClassSet supers, subs;
        for (const auto& d : replaced) {
            const auto& frame = *m_.find_class(d);
            supers.insert(frame.superclasses.begin(), frame.superclasses.end());
            for (auto& s : m_.subclasses(d))
                subs.insert(std::move(s));
        }
        for (const auto& p : pre) {
            const auto& o = src(p.source);
            for (const auto& s : o.find_class(p.name)->superclasses)
                if (auto i = img(FrameKind::Class, o.id(s)))
                    supers.insert(*i);
            for (const auto& s : o.subclasses(p.name))
                if (auto i = img(FrameKind::Class, o.id(s)))
                    subs.insert(*i);
        }

        auto name = merge_name(FrameKind::Class, a, pa, b, requested, replaced);
        for (const auto& d : replaced)
            erase_frame(FrameKind::Class, d);
        for (const auto& d : replaced)
            rewrite_class(d, name);

        ClassFrame frame{name, {}};
        for (const auto& s : supers)
            if (!replaced.contains(s) && s != name)
                frame.superclasses.insert(s);
        m_.add_class(std::move(frame));
        for (const auto& s : subs)
            if (!replaced.contains(s) && s != name)
                m_.find_class(s)->superclasses.insert(name);

        finish_merge(FrameKind::Class, name, replaced, pre);
        for (const auto& p : pre)
            carry_slots(p, name);
        return name;
    }

    // Current frame behind a merge argument: its merged image if any, else the source frame.
    SlotFrame slot_target(const FrameId& ref, const Participants& p) const
    {
        if (!p.merged.empty())
            return *m_.find_slot(*p.merged.begin());
        return *src(ref.source).find_slot(ref.name);
    }

    std::string merge_slots(const FrameId& a, const FrameId& b, const std::optional<std::string>& requested)
    {
        auto pa = gather(FrameKind::Slot, a);
        auto pb = gather(FrameKind::Slot, b);
        check_distinct(FrameKind::Slot, a, b, pa, pb);
        auto ta = slot_target(a, pa);
        auto tb = slot_target(b, pb);
        if (ta.kind != tb.kind)
            throw Error(ErrorCode::KindMismatch, "cannot merge " + std::string(ta.is_object() ? "object" : "datatype") +
                                                     " slot '" + a.str() + "' with " +
                                                     std::string(tb.is_object() ? "object" : "datatype") + " slot '" +
                                                     b.str() + "'");
        std::set<std::string> replaced = pa.merged;
        replaced.insert(pb.merged.begin(), pb.merged.end());
        std::set<FrameId> pre = pa.pre;
        pre.insert(pb.pre.begin(), pb.pre.end());
        mark(pa);
        mark(pb);

        SlotFrame merged;
        merged.kind = ta.kind;
        ClassSet range;
        for (const auto& d : replaced) {
            const auto& frame = *m_.find_slot(d);
            merged.domain.insert(frame.domain.begin(), frame.domain.end());
            if (frame.is_object())
                range.insert(frame.range_classes().begin(), frame.range_classes().end());
        }
        bool source_thing = false;
        for (const auto& p : pre) {
            const auto& o = src(p.source);
            const auto& s = *o.find_slot(p.name);
            for (const auto& d : s.domain)
                if (auto i = img(FrameKind::Class, o.id(d)))
                    merged.domain.insert(*i);
            if (s.is_object()) {
                for (const auto& r : s.range_classes()) {
                    if (r == kThing) {
                        source_thing = true;
                        range.insert(r);
                    } else if (auto i = img(FrameKind::Class, o.id(r))) {
                        range.insert(*i);
                    }
                }
            }
        }
        if (merged.is_object()) {
            if (range.size() > 1 && !source_thing)
                range.erase(std::string(kThing));
            if (range.empty())
                range.insert(std::string(kThing));
            merged.range = std::move(range);
        }

        merged.card.min = std::min(ta.card.min, tb.card.min);
        if (ta.card.max && tb.card.max)
            merged.card.max = std::max(*ta.card.max, *tb.card.max);

        auto name = merge_name(FrameKind::Slot, a, pa, b, requested, replaced);

        std::optional<DatatypeMismatch> mismatch;
        if (!merged.is_object()) {
            XsdKind ka = ta.range_kind(), kb = tb.range_kind();
            merged.range = ka;
            std::vector<std::pair<std::string, XsdKind>> candidates;
            for (const auto& p : pre) {
                std::pair<std::string, XsdKind> c{p.source, src(p.source).find_slot(p.name)->range_kind()};
                if (std::find(candidates.begin(), candidates.end(), c) == candidates.end())
                    candidates.push_back(c);
            }
            for (auto k : {ka, kb}) {
                bool present = std::any_of(candidates.begin(), candidates.end(),
                                           [k](const auto& c) { return c.second == k; });
                if (!present)
                    candidates.emplace_back(m_.name(), k);
            }
            for (const auto& mm : st_.mismatches)
                if (replaced.contains(mm.slot))
                    for (const auto& c : mm.candidates)
                        if (std::find(candidates.begin(), candidates.end(), c) == candidates.end())
                            candidates.push_back(c);
            bool pending = ka != kb || std::any_of(st_.mismatches.begin(), st_.mismatches.end(), [&](const auto& mm) {
                               return replaced.contains(mm.slot);
                           });
            if (pending) {
                std::optional<XsdKind> preferred;
                if (st_.preferred)
                    for (const auto& [source, kind] : candidates)
                        if (source == *st_.preferred && !preferred)
                            preferred = kind;
                if (preferred) {
                    merged.range = *preferred;
                    rec_.notes.push_back("datatype of '" + name + "' taken from preferred ontology " + *st_.preferred);
                } else {
                    mismatch = DatatypeMismatch{name, candidates};
                }
            }
        }

        for (const auto& d : replaced)
            erase_frame(FrameKind::Slot, d);
        std::erase_if(st_.mismatches, [&](const DatatypeMismatch& mm) { return replaced.contains(mm.slot); });
        for (const auto& d : replaced)
            rewrite_slot(d, name);
        merged.name = name;
        m_.add_slot(std::move(merged));
        if (mismatch)
            st_.mismatches.push_back(std::move(*mismatch));
        finish_merge(FrameKind::Slot, name, replaced, pre);

        suggest_class_merges(pa.pre, pb.pre);
        return name;
    }

    void suggest_class_merges(const std::set<FrameId>& side_a, const std::set<FrameId>& side_b)
    {
        std::set<std::pair<FrameId, FrameId>> seen;
        auto propose = [&](const FrameId& sa, const FrameId& sb, const FrameId& x, const FrameId& y,
                           std::string_view role) {
            if (x == y || x.name == kThing || y.name == kThing)
                return;
            auto ix = img(FrameKind::Class, x), iy = img(FrameKind::Class, y);
            if (ix && iy && *ix == *iy)
                return;
            if (seen.contains({x, y}) || seen.contains({y, x}))
                return;
            seen.insert({x, y});
            FollowUp f{MergeClasses{x, y, std::nullopt}, ExplanationKind::SlotMergeFollowup,
                       "slots '" + sa.str() + "' and '" + sb.str() + "' were merged; their " + std::string(role) +
                           " classes '" + x.str() + "' and '" + y.str() + "' come from different ontologies",
                       {sa, sb, x, y}};
            rec_.followups.push_back(std::move(f));
        };
        for (const auto& sa : side_a) {
            for (const auto& sb : side_b) {
                if (sa.source == sb.source)
                    continue;
                const auto& oa = src(sa.source);
                const auto& ob = src(sb.source);
                const auto& fa = *oa.find_slot(sa.name);
                const auto& fb = *ob.find_slot(sb.name);
                for (const auto& x : fa.domain)
                    for (const auto& y : fb.domain)
                        propose(sa, sb, oa.id(x), ob.id(y), "domain");
                if (fa.is_object() && fb.is_object())
                    for (const auto& x : fa.range_classes())
                        for (const auto& y : fb.range_classes())
                            propose(sa, sb, oa.id(x), ob.id(y), "range");
            }
        }
    }

    std::string merge_instances(const FrameId& a, const FrameId& b, const std::optional<std::string>& requested,
                                bool confirm)
    {
        auto pa = gather(FrameKind::Instance, a);
        auto pb = gather(FrameKind::Instance, b);
        check_distinct(FrameKind::Instance, a, b, pa, pb);
        mark(pa);
        mark(pb);

        auto imaged_types = [&](const Participants& p) {
            ClassSet out;
            for (const auto& d : p.merged)
                for (const auto& t : m_.find_instance(d)->types)
                    out.insert(t);
            for (const auto& pre : p.pre)
                for (const auto& t : src(pre.source).find_instance(pre.name)->types)
                    if (auto i = img(FrameKind::Class, FrameId{pre.source, t}))
                        out.insert(*i);
            return out;
        };
        auto types_a = imaged_types(pa);
        auto types_b = imaged_types(pb);
        bool disjoint = !types_a.empty() && !types_b.empty() &&
                        std::none_of(types_a.begin(), types_a.end(), [&](const auto& t) { return types_b.contains(t); });
        if (disjoint) {
            if (!confirm)
                throw Error(ErrorCode::ConfirmationRequired,
                            "instances '" + a.str() + "' and '" + b.str() + "' have types with distinct images '" +
                                *types_a.begin() + "' and '" + *types_b.begin() +
                                "'; merging them requires confirmation");
            auto merged = merge_classes(mid(*types_a.begin()), mid(*types_b.begin()), std::nullopt);
            rec_.notes.push_back("merged type images into class '" + merged + "'");
        }

        std::set<std::string> replaced = pa.merged;
        replaced.insert(pb.merged.begin(), pb.merged.end());
        std::set<FrameId> pre = pa.pre;
        pre.insert(pb.pre.begin(), pb.pre.end());
        std::set<FrameId> fresh = pa.fresh;
        fresh.insert(pb.fresh.begin(), pb.fresh.end());

        InstanceFrame frame;
        for (const auto& p : pre) {
            const auto& o = src(p.source);
            for (const auto& t : o.find_instance(p.name)->types) {
                auto i = img(FrameKind::Class, o.id(t));
                frame.types.insert(i ? *i : shallow_copy(o.id(t)));
            }
        }
        for (const auto& d : replaced) {
            const auto& inst = *m_.find_instance(d);
            frame.types.insert(inst.types.begin(), inst.types.end());
            for (const auto& [slot, values] : inst.values)
                for (const auto& v : values)
                    add_value(frame.values[slot], v);
        }

        // slot image -> source instance values, for the follow-up rule
        std::map<std::string, std::set<FrameId>> frame_values;
        for (const auto& p : pre) {
            const auto& o = src(p.source);
            for (const auto& [slot, values] : o.find_instance(p.name)->values) {
                bool is_fresh = fresh.contains(p);
                auto si = is_fresh ? ensure_slot_image(o.id(slot)) : img(FrameKind::Slot, o.id(slot)).value_or("");
                if (si.empty())
                    continue;
                for (const auto& v : values) {
                    if (const auto* lit = std::get_if<Literal>(&v)) {
                        if (is_fresh)
                            add_value(frame.values[si], *lit);
                        continue;
                    }
                    auto ref = o.id(std::get<InstanceRef>(v).name);
                    frame_values[si].insert(ref);
                    if (!is_fresh)
                        continue;
                    if (auto i = img(FrameKind::Instance, ref))
                        add_value(frame.values[si], InstanceRef{*i});
                    else
                        rec_.notes.push_back("value '" + ref.str() + "' of slot '" + si + "' has no image yet");
                }
            }
        }

        auto name = merge_name(FrameKind::Instance, a, pa, b, requested, replaced);
        for (const auto& d : replaced)
            erase_frame(FrameKind::Instance, d);
        frame.name = name;
        // references from the merged instance to a replaced one point to itself now
        m_.add_instance(std::move(frame));
        for (const auto& d : replaced)
            rewrite_instance(d, name);
        finish_merge(FrameKind::Instance, name, replaced, pre);

        for (const auto& [slot, refs] : frame_values) {
            std::vector<FrameId> list(refs.begin(), refs.end());
            for (std::size_t i = 0; i < list.size(); ++i) {
                for (std::size_t j = i + 1; j < list.size(); ++j) {
                    const auto& x = list[i];
                    const auto& y = list[j];
                    if (x.source == y.source)
                        continue;
                    auto ix = img(FrameKind::Instance, x), iy = img(FrameKind::Instance, y);
                    if (ix && iy && *ix == *iy)
                        continue;
                    rec_.followups.push_back(FollowUp{
                        MergeInstances{x, y, std::nullopt, false}, ExplanationKind::InstanceValueFollowup,
                        "merged instance '" + name + "' holds values '" + x.str() + "' and '" + y.str() +
                            "' of slot '" + slot + "' from different ontologies",
                        {x, y}});
                }
            }
        }
        return name;
    }

    // ---- edits ----------------------------------------------------------

    std::optional<FrameId> dispatch(const MergeClasses& o)
    {
        return mid(merge_classes(o.a, o.b, o.name));
    }

    std::optional<FrameId> dispatch(const MergeSlots& o)
    {
        return mid(merge_slots(o.a, o.b, o.name));
    }

    std::optional<FrameId> dispatch(const MergeInstances& o)
    {
        return mid(merge_instances(o.a, o.b, o.name, o.confirm));
    }

    std::optional<FrameId> dispatch(const ShallowCopy& o) { return mid(shallow_copy(o.cls)); }

    std::optional<FrameId> dispatch(const DeepCopy& o) { return mid(deep_copy(o.cls)); }

    std::optional<FrameId> dispatch(const CopySlot& o)
    {
        if (is_merged_ref(o.slot) || !source_has(FrameKind::Slot, o.slot))
            throw Error(ErrorCode::UnknownFrame, "slot '" + o.slot.str() + "' does not exist in a source ontology");
        if (auto i = img(FrameKind::Slot, o.slot))
            throw Error(ErrorCode::AlreadyImaged, "slot '" + o.slot.str() + "' already has image '" + *i + "'");
        return mid(ensure_slot_image(o.slot));
    }

    std::optional<FrameId> dispatch(const CreateClass& o)
    {
        check_new_name(FrameKind::Class, o.name);
        if (m_.contains(FrameKind::Class, o.name))
            throw Error(ErrorCode::NameCollision, "class '" + o.name + "' already exists in the merged ontology");
        ClassFrame frame{o.name, {}};
        for (const auto& s : o.superclasses) {
            if (s == kThing)
                continue;
            if (!m_.find_class(s))
                throw Error(ErrorCode::UnknownFrame, "superclass '" + s + "' does not exist in the merged ontology");
            frame.superclasses.insert(s);
        }
        m_.add_class(std::move(frame));
        st_.explicit_frames[idx(FrameKind::Class)].insert(o.name);
        rec_.created.push_back(mid(o.name));
        return mid(o.name);
    }

    std::optional<FrameId> dispatch(const AddSuperclass& o)
    {
        auto cls = resolve_merged(FrameKind::Class, o.cls);
        if (o.super.name == kThing && o.super.source.empty())
            return mid(cls);
        auto super = resolve_merged(FrameKind::Class, o.super);
        if (super == cls || would_create_cycle(m_, cls, super))
            throw Error(ErrorCode::CycleIntroduced,
                        "making '" + super + "' a superclass of '" + cls + "' would create a cycle");
        m_.find_class(cls)->superclasses.insert(super);
        rewritten_[idx(FrameKind::Class)].insert(cls);
        return mid(cls);
    }

    std::optional<FrameId> dispatch(const RemoveSuperclass& o)
    {
        auto cls = resolve_merged(FrameKind::Class, o.cls);
        if (o.super.name == kThing && o.super.source.empty())
            throw Error(ErrorCode::InvalidArgument, "the edge to Thing is implicit and cannot be removed");
        auto super = resolve_merged(FrameKind::Class, o.super);
        if (!m_.find_class(cls)->superclasses.erase(super))
            throw Error(ErrorCode::InvalidArgument, "'" + super + "' is not a direct superclass of '" + cls + "'");
        rewritten_[idx(FrameKind::Class)].insert(cls);
        return mid(cls);
    }

    void rename(FrameKind kind, const std::string& from, const std::string& to)
    {
        auto move = [&](auto& map) {
            auto node = map.extract(from);
            node.key() = to;
            node.mapped().name = to;
            map.insert(std::move(node));
        };
        switch (kind) {
        case FrameKind::Class: move(m_.classes()); break;
        case FrameKind::Slot: move(m_.slots()); break;
        case FrameKind::Instance: move(m_.instances()); break;
        }
        rewrite(kind, from, to);
    }

    std::optional<FrameId> dispatch(const RenameFrame& o)
    {
        auto from = resolve_merged(o.kind, o.frame);
        check_new_name(o.kind, o.name);
        if (from == o.name)
            return mid(from);
        if (m_.contains(o.kind, o.name))
            throw Error(ErrorCode::NameCollision,
                        std::string(to_string(o.kind)) + " '" + o.name + "' already exists in the merged ontology");
        rename(o.kind, from, o.name);
        rec_.touched.insert(mid(from));
        rec_.rewritten.push_back(mid(o.name));
        return mid(o.name);
    }

    std::optional<FrameId> dispatch(const RemoveFrame& o)
    {
        auto name = resolve_merged(o.kind, o.frame);
        for (const auto& p : preimages(o.kind, name))
            rec_.touched.insert(p);
        erase_frame(o.kind, name);
        drop_images_to(o.kind, name);
        switch (o.kind) {
        case FrameKind::Class: scrub_class(name); break;
        case FrameKind::Slot: scrub_slot(name); break;
        case FrameKind::Instance: scrub_instance(name); break;
        }
        rec_.touched.insert(mid(name));
        rec_.deleted.push_back(mid(name));
        return std::nullopt;
    }

    std::optional<FrameId> dispatch(const SwapNames& o)
    {
        auto a = resolve_merged(o.kind, o.a);
        auto b = resolve_merged(o.kind, o.b);
        if (a == b)
            throw Error(ErrorCode::SameFrame, "'" + o.a.str() + "' and '" + o.b.str() + "' are the same frame");
        const std::string parked = "\x01swap";
        rename(o.kind, a, parked);
        rename(o.kind, b, a);
        rename(o.kind, parked, b);
        rec_.touched.insert(mid(a));
        rec_.touched.insert(mid(b));
        rec_.rewritten.push_back(mid(a));
        rec_.rewritten.push_back(mid(b));
        return mid(b);
    }

    std::optional<FrameId> dispatch(const SetSlotRange& o)
    {
        auto name = resolve_merged(FrameKind::Slot, o.slot);
        auto& slot = *m_.find_slot(name);
        if (std::holds_alternative<ClassSet>(o.range) != slot.is_object())
            throw Error(ErrorCode::KindMismatch, "range kind does not match slot '" + name + "'");
        if (const auto* classes = std::get_if<ClassSet>(&o.range)) {
            if (classes->empty())
                throw Error(ErrorCode::InvalidArgument, "an object property needs at least one range class");
            for (const auto& c : *classes)
                if (c != kThing && !m_.find_class(c))
                    throw Error(ErrorCode::UnknownFrame, "range class '" + c + "' does not exist in the merged ontology");
        }
        slot.range = o.range;
        std::erase_if(st_.mismatches, [&](const DatatypeMismatch& mm) { return mm.slot == name; });
        rec_.touched.insert(mid(name));
        return mid(name);
    }

    std::optional<FrameId> dispatch(const SetCardinality& o)
    {
        auto name = resolve_merged(FrameKind::Slot, o.slot);
        if (o.card.max && *o.card.max == 0)
            throw Error(ErrorCode::InvalidArgument, "max-card must be positive");
        if (o.card.max && o.card.min > *o.card.max)
            throw Error(ErrorCode::InvalidArgument, "min-card exceeds max-card");
        m_.find_slot(name)->card = o.card;
        rec_.touched.insert(mid(name));
        return mid(name);
    }

    std::optional<FrameId> dispatch(const SetPreferred& o)
    {
        if (o.source && !session_.source(*o.source))
            throw Error(ErrorCode::InvalidArgument, "no source ontology named '" + *o.source + "'");
        st_.preferred = o.source;
        return std::nullopt;
    }

    // ---- post-conditions ------------------------------------------------

    // Values on a slot that no longer reaches any type of the instance get the
    // slot attached to the instance's first type; untyped instances drop them.
    void repair_attachments()
    {
        for (auto& [name, inst] : m_.instances()) {
            ClassSet reachable;
            for (const auto& t : inst.types) {
                if (!m_.find_class(t))
                    continue;
                reachable.insert(t);
                for (auto& a : ancestors(m_, t))
                    reachable.insert(std::move(a));
            }
            for (auto it = inst.values.begin(); it != inst.values.end();) {
                auto* slot = m_.find_slot(it->first);
                bool attached = !slot || slot->domain.empty() ||
                                std::any_of(slot->domain.begin(), slot->domain.end(),
                                            [&](const auto& d) { return reachable.contains(d); });
                if (attached) {
                    ++it;
                } else if (!reachable.empty()) {
                    slot->domain.insert(*inst.types.begin());
                    rewritten_[idx(FrameKind::Slot)].insert(slot->name);
                    rec_.notes.push_back("attached slot '" + slot->name + "' to '" + *inst.types.begin() +
                                         "' to keep values of instance '" + name + "'");
                    ++it;
                } else {
                    rec_.notes.push_back("dropped values of slot '" + it->first + "' from untyped instance '" + name + "'");
                    it = inst.values.erase(it);
                }
            }
        }
    }

    void finish()
    {
        repair_attachments();
        if (has_cycle(m_))
            throw Error(ErrorCode::CycleIntroduced, "operation would create a subclass cycle");
        for (FrameKind kind : {FrameKind::Class, FrameKind::Slot, FrameKind::Instance}) {
            for (const auto& name : rewritten_[idx(kind)]) {
                if (!m_.contains(kind, name))
                    continue;
                auto id = mid(name);
                if (std::find(rec_.rewritten.begin(), rec_.rewritten.end(), id) == rec_.rewritten.end())
                    rec_.rewritten.push_back(id);
            }
        }
        for (const auto& c : rec_.created)
            rec_.touched.insert(c);
        for (const auto& d : rec_.deleted)
            rec_.touched.insert(d);
    }
};

} // namespace

std::string_view to_string(SuffixPolicy policy)
{
    return policy == SuffixPolicy::AlwaysSuffix ? "always-suffix" : "suffix-on-collision";
}

std::optional<SuffixPolicy> parse_suffix_policy(std::string_view text)
{
    if (text == "suffix-on-collision")
        return SuffixPolicy::SuffixOnCollision;
    if (text == "always-suffix")
        return SuffixPolicy::AlwaysSuffix;
    return std::nullopt;
}

MergeSession::MergeSession(std::vector<Ontology> sources, EngineConfig config)
    : sources_(std::move(sources)), config_(std::move(config))
{
    if (sources_.size() < 2)
        throw Error(ErrorCode::InvalidArgument, "a merge session needs at least two source ontologies");
    std::set<std::string> names;
    for (const auto& s : sources_) {
        if (s.name().empty() || s.name() == config_.merged_name)
            throw Error(ErrorCode::InvalidArgument, "source ontology name '" + s.name() + "' is not usable");
        if (!names.insert(s.name()).second)
            throw Error(ErrorCode::InvalidArgument, "two source ontologies are named '" + s.name() + "'");
    }
    state_.merged = Ontology(config_.merged_name);
}

const Ontology* MergeSession::source(std::string_view name) const
{
    for (const auto& s : sources_)
        if (s.name() == name)
            return &s;
    return nullptr;
}

const std::map<FrameId, std::string>& MergeSession::image_map(FrameKind kind) const
{
    return state_.images[idx(kind)];
}

std::optional<std::string> MergeSession::image(FrameKind kind, const FrameId& source_frame) const
{
    const auto& map = state_.images[idx(kind)];
    auto it = map.find(source_frame);
    if (it == map.end())
        return std::nullopt;
    return it->second;
}

std::vector<FrameId> MergeSession::preimages(FrameKind kind, std::string_view merged_name) const
{
    std::vector<FrameId> out;
    for (const auto& [from, to] : state_.images[idx(kind)])
        if (to == merged_name)
            out.push_back(from);
    return out;
}

bool MergeSession::is_explicit(FrameKind kind, std::string_view merged_name) const
{
    return state_.explicit_frames[idx(kind)].contains(std::string(merged_name));
}

std::optional<std::string> MergeSession::merged_frame(FrameKind kind, const FrameId& ref) const
{
    if (ref.source == state_.merged.name())
        return state_.merged.contains(kind, ref.name) ? std::optional<std::string>(ref.name) : std::nullopt;
    return image(kind, ref);
}

bool MergeSession::resolves(FrameKind kind, const FrameId& ref) const
{
    if (ref.source == state_.merged.name())
        return state_.merged.contains(kind, ref.name);
    const auto* s = source(ref.source);
    return s && s->contains(kind, ref.name);
}

std::string MergeSession::base_name(std::string_view name) const
{
    std::string n(name);
    // strip a trailing _<k> counter first
    auto strip_counter = [](const std::string& s) {
        auto us = s.rfind('_');
        if (us == std::string::npos || us + 1 == s.size())
            return s;
        if (!std::all_of(s.begin() + static_cast<std::ptrdiff_t>(us) + 1, s.end(),
                         [](char c) { return c >= '0' && c <= '9'; }))
            return s;
        return s.substr(0, us);
    };
    for (const auto& candidate : {n, strip_counter(n)}) {
        for (const auto& s : sources_) {
            auto suffix = "_" + s.name();
            if (candidate.size() > suffix.size() && candidate.ends_with(suffix))
                return candidate.substr(0, candidate.size() - suffix.size());
        }
    }
    return n;
}

AppliedRecord MergeSession::apply(const Operation& op)
{
    State next = state_;
    AppliedRecord record;
    record.op = op;
    Applier applier(*this, next, record);
    record.result = applier.run(op);
    state_ = std::move(next);
    log_.push_back(op);
    return record;
}

void MergeSession::undo()
{
    if (log_.empty())
        throw Error(ErrorCode::EmptyLog, "nothing to undo");
    auto ops = std::move(log_);
    ops.pop_back();
    log_.clear();
    state_ = State{};
    state_.merged = Ontology(config_.merged_name);
    for (const auto& op : ops)
        apply(op);
}

FrameId MergeSession::merge_classes(const FrameId& a, const FrameId& b, std::optional<std::string> name)
{
    return *apply(MergeClasses{a, b, std::move(name)}).result;
}

FrameId MergeSession::merge_slots(const FrameId& a, const FrameId& b, std::optional<std::string> name)
{
    return *apply(MergeSlots{a, b, std::move(name)}).result;
}

FrameId MergeSession::merge_instances(const FrameId& a, const FrameId& b, std::optional<std::string> name,
                                      bool confirm)
{
    return *apply(MergeInstances{a, b, std::move(name), confirm}).result;
}

FrameId MergeSession::shallow_copy_class(const FrameId& cls) { return *apply(ShallowCopy{cls}).result; }

FrameId MergeSession::deep_copy_class(const FrameId& cls) { return *apply(DeepCopy{cls}).result; }

FrameId MergeSession::copy_slot(const FrameId& slot) { return *apply(CopySlot{slot}).result; }

} // namespace ontomerge
