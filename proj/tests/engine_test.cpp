#include "support.hpp"

#include <gtest/gtest.h>

using namespace ontomerge;
using namespace testing_support;

namespace {

ErrorCode code_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::InvalidArgument;
}

MergeSession bibliography_session(EngineConfig config = {})
{
    return MergeSession({ruby(), niagara()}, config);
}

/// Two sources sharing a `person` class with a datatype `code` slot of different kinds.
MergeSession people_session()
{
    Ontology a("A"), b("B");
    a.add_class({"person", {}});
    a.add_class({"student", {"person"}});
    a.add_slot(datatype_slot("code", {"person"}, XsdKind::Integer, {1, 1u}));
    a.add_instance({"ann", {"student"}, {{"code", {Literal{"7", XsdKind::Integer}}}}});
    b.add_class({"person", {}});
    b.add_class({"teacher", {"person"}});
    b.add_slot(datatype_slot("code", {"person"}, XsdKind::NCName, {0, 3u}));
    b.add_instance({"ann", {"teacher"}, {{"code", {Literal{"x7", XsdKind::NCName}}}}});
    return MergeSession({a, b});
}

} // namespace

TEST(Session, ConstructorChecksSources)
{
    EXPECT_EQ(code_of([] { MergeSession({ruby()}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { MergeSession({ruby(), ruby()}); }), ErrorCode::InvalidArgument);
    auto clash = niagara();
    clash.set_name("GlobalOntology");
    EXPECT_EQ(code_of([&] { MergeSession({ruby(), clash}); }), ErrorCode::InvalidArgument);
}

TEST(Session, SuffixPolicyNames)
{
    EXPECT_EQ(parse_suffix_policy("always-suffix"), SuffixPolicy::AlwaysSuffix);
    EXPECT_EQ(to_string(SuffixPolicy::SuffixOnCollision), "suffix-on-collision");
    EXPECT_FALSE(parse_suffix_policy("never"));
}

TEST(MergeClasses, CreatesImageForBoth)
{
    auto s = bibliography_session();
    auto m = s.merge_classes(fid("author", "Ruby_bibliography"), fid("author", "Niagara_bib"));
    EXPECT_EQ(m, fid("author", "GlobalOntology"));
    EXPECT_EQ(s.image(FrameKind::Class, fid("author", "Ruby_bibliography")), "author");
    EXPECT_EQ(s.image(FrameKind::Class, fid("author", "Niagara_bib")), "author");
    EXPECT_EQ(s.preimages(FrameKind::Class, "author").size(), 2u);
    EXPECT_FALSE(s.is_explicit(FrameKind::Class, "author"));
    // both sources' author slots come along
    EXPECT_NE(s.merged().find_slot("firstname"), nullptr);
    EXPECT_NE(s.merged().find_slot("lastname"), nullptr);
}

TEST(MergeClasses, RequestedNameAndErrors)
{
    auto s = bibliography_session();
    auto m = s.merge_classes(fid("bibliography", "Ruby_bibliography"), fid("bib", "Niagara_bib"), "bibliography");
    EXPECT_EQ(m.name, "bibliography");
    EXPECT_EQ(code_of([&] { s.merge_classes(fid("author", "Ruby_bibliography"), fid("author", "Niagara_bib"), "bibliography"); }),
              ErrorCode::NameCollision);
    EXPECT_EQ(code_of([&] { s.merge_classes(fid("author", "Ruby_bibliography"), fid("author", "Ruby_bibliography")); }),
              ErrorCode::SameFrame);
    EXPECT_EQ(code_of([&] { s.merge_classes(fid("nobody", "Ruby_bibliography"), fid("author", "Niagara_bib")); }),
              ErrorCode::UnknownFrame);
    EXPECT_EQ(code_of([&] { s.merge_classes(fid("author", "Ruby_bibliography"), fid("author", "Niagara_bib"), "1x"); }),
              ErrorCode::InvalidArgument);
}

TEST(MergeClasses, DifferentNamesDefaultToFirst)
{
    auto s = bibliography_session();
    auto m = s.merge_classes(fid("bibliography", "Ruby_bibliography"), fid("bib", "Niagara_bib"));
    EXPECT_EQ(m.name, "bibliography");
}

TEST(ShallowCopy, CopiesClassAndAttachedSlots)
{
    auto s = bibliography_session();
    s.shallow_copy_class(fid("vendor", "Niagara_bib"));
    const auto& m = s.merged();
    ASSERT_NE(m.find_class("vendor"), nullptr);
    for (auto slot : {"id", "name", "email", "phone"})
        EXPECT_EQ(m.find_slot(slot)->domain, ClassSet{"vendor"}) << slot;
    // hasbook ranges over an uncopied class: placeholder range until book arrives
    EXPECT_EQ(m.find_slot("hasbook")->range_classes(), ClassSet{std::string(kThing)});
    s.shallow_copy_class(fid("book", "Niagara_bib"));
    EXPECT_EQ(s.merged().find_slot("hasbook")->range_classes(), ClassSet{"book"});
    EXPECT_TRUE(validate(s.merged()).empty());
}

TEST(ShallowCopy, SuffixOnCollisionAndAlwaysSuffix)
{
    auto s = bibliography_session();
    s.shallow_copy_class(fid("author", "Ruby_bibliography"));
    s.shallow_copy_class(fid("author", "Niagara_bib"));
    EXPECT_NE(s.merged().find_class("author"), nullptr);
    EXPECT_NE(s.merged().find_class("author_Niagara_bib"), nullptr);
    EXPECT_EQ(s.base_name("author_Niagara_bib"), "author");
    EXPECT_EQ(s.base_name("author_Niagara_bib_2"), "author");
    EXPECT_EQ(s.base_name("author_x"), "author_x");

    auto t = bibliography_session(EngineConfig{"GlobalOntology", SuffixPolicy::AlwaysSuffix});
    t.shallow_copy_class(fid("book", "Niagara_bib"));
    EXPECT_NE(t.merged().find_class("book_Niagara_bib"), nullptr);
}

TEST(ShallowCopy, AlreadyImagedAndMergedRefsRejected)
{
    auto s = bibliography_session();
    s.shallow_copy_class(fid("book", "Niagara_bib"));
    EXPECT_EQ(code_of([&] { s.shallow_copy_class(fid("book", "Niagara_bib")); }), ErrorCode::AlreadyImaged);
    EXPECT_EQ(code_of([&] { s.shallow_copy_class(fid("book", "GlobalOntology")); }), ErrorCode::UnknownFrame);
}

TEST(ShallowCopy, LinksExistingSubclassImages)
{
    auto s = people_session();
    s.shallow_copy_class(fid("student", "A"));
    s.shallow_copy_class(fid("person", "A"));
    EXPECT_EQ(s.merged().find_class("student")->superclasses, ClassSet{"person"});
}

TEST(DeepCopy, CopiesAncestorsToo)
{
    auto s = people_session();
    s.deep_copy_class(fid("student", "A"));
    ASSERT_NE(s.merged().find_class("person"), nullptr);
    EXPECT_EQ(s.merged().find_class("student")->superclasses, ClassSet{"person"});
    EXPECT_TRUE(validate(s.merged()).empty());
}

TEST(MergeSlots, UnionsDomainsAndWidensCardinality)
{
    auto s = bibliography_session();
    s.shallow_copy_class(fid("biblioentry", "Ruby_bibliography"));
    s.shallow_copy_class(fid("book", "Niagara_bib"));
    auto m = s.merge_slots(fid("title", "Ruby_bibliography"), fid("title", "Niagara_bib"));
    const auto* title = s.merged().find_slot(m.name);
    ASSERT_NE(title, nullptr);
    EXPECT_EQ(title->domain, (ClassSet{"biblioentry", "book"}));
    EXPECT_EQ(title->range_kind(), XsdKind::String);
    auto h = s.merge_slots(fid("hasauthor", "Ruby_bibliography"), fid("hasauthor", "Niagara_bib"));
    EXPECT_EQ(s.merged().find_slot(h.name)->card, (Cardinality{1, std::nullopt}));
}

TEST(MergeSlots, DatatypeDisagreementRecordedOrResolvedByPreferred)
{
    auto s = people_session();
    s.merge_classes(fid("person", "A"), fid("person", "B"));
    ASSERT_EQ(s.mismatches().size(), 0u);
    auto m = s.merge_slots(fid("code", "A"), fid("code", "B"));
    EXPECT_EQ(s.merged().find_slot(m.name)->card, (Cardinality{0, 3u}));
    ASSERT_EQ(s.mismatches().size(), 1u);
    EXPECT_EQ(s.mismatches()[0].slot, m.name);

    auto t = people_session();
    t.apply(SetPreferred{"B"});
    t.merge_classes(fid("person", "A"), fid("person", "B"));
    auto n = t.merge_slots(fid("code", "A"), fid("code", "B"));
    EXPECT_TRUE(t.mismatches().empty());
    EXPECT_EQ(t.merged().find_slot(n.name)->range_kind(), XsdKind::NCName);
}

TEST(MergeSlots, KindMismatch)
{
    auto s = bibliography_session();
    EXPECT_EQ(code_of([&] { s.merge_slots(fid("id", "Ruby_bibliography"), fid("hasbook", "Niagara_bib")); }),
              ErrorCode::KindMismatch);
}

TEST(MergeSlots, FollowUpsProposeMergingDomainsAndRanges)
{
    auto s = bibliography_session();
    auto r = s.apply(MergeSlots{fid("hasauthor", "Ruby_bibliography"), fid("hasauthor", "Niagara_bib"), std::nullopt});
    std::vector<std::string> keys;
    for (const auto& f : r.followups)
        keys.push_back(to_line(f.op));
    EXPECT_NE(std::find(keys.begin(), keys.end(), "merge-classes a=author@Ruby_bibliography b=author@Niagara_bib"),
              keys.end());
    EXPECT_NE(std::find(keys.begin(), keys.end(), "merge-classes a=biblioentry@Ruby_bibliography b=book@Niagara_bib"),
              keys.end());
}

TEST(MergeInstances, ConfirmationForDisjointTypeImages)
{
    auto s = people_session();
    s.shallow_copy_class(fid("student", "A"));
    s.shallow_copy_class(fid("teacher", "B"));
    EXPECT_EQ(code_of([&] { s.merge_instances(fid("ann", "A"), fid("ann", "B")); }), ErrorCode::ConfirmationRequired);
    EXPECT_EQ(s.merged().instances().size(), 0u);
    auto m = s.merge_instances(fid("ann", "A"), fid("ann", "B"), std::nullopt, true);
    const auto* ann = s.merged().find_instance(m.name);
    ASSERT_NE(ann, nullptr);
    EXPECT_EQ(ann->types.size(), 1u);
    EXPECT_TRUE(validate(s.merged()).empty());
}

TEST(MergeInstances, CopiesUnimagedTypes)
{
    auto s = people_session();
    auto m = s.merge_instances(fid("ann", "A"), fid("ann", "B"));
    const auto* ann = s.merged().find_instance(m.name);
    ASSERT_NE(ann, nullptr);
    EXPECT_EQ(ann->types, (ClassSet{"student", "teacher"}));
    EXPECT_TRUE(validate(s.merged()).empty());
}

TEST(Edits, CreateAddRemoveSuperclass)
{
    auto s = bibliography_session();
    s.merge_classes(fid("author", "Ruby_bibliography"), fid("author", "Niagara_bib"));
    s.apply(CreateClass{"Person", {}});
    EXPECT_TRUE(s.is_explicit(FrameKind::Class, "Person"));
    EXPECT_EQ(code_of([&] { s.apply(CreateClass{"Person", {}}); }), ErrorCode::NameCollision);
    s.apply(AddSuperclass{fid("author", "GlobalOntology"), fid("Person", "GlobalOntology")});
    EXPECT_EQ(s.merged().find_class("author")->superclasses, ClassSet{"Person"});
    EXPECT_EQ(code_of([&] { s.apply(AddSuperclass{fid("Person", "GlobalOntology"), fid("author", "GlobalOntology")}); }),
              ErrorCode::CycleIntroduced);
    s.apply(RemoveSuperclass{fid("author", "GlobalOntology"), fid("Person", "GlobalOntology")});
    EXPECT_TRUE(s.merged().find_class("author")->superclasses.empty());
}

TEST(Edits, SourceRefsResolveThroughImages)
{
    auto s = bibliography_session();
    s.merge_classes(fid("author", "Ruby_bibliography"), fid("author", "Niagara_bib"));
    s.apply(CreateClass{"Person", {}});
    s.apply(AddSuperclass{fid("author", "Niagara_bib"), fid("Person", "GlobalOntology")});
    EXPECT_EQ(s.merged().find_class("author")->superclasses, ClassSet{"Person"});
}

TEST(Edits, RenameRewritesReferences)
{
    auto s = bibliography_session();
    s.shallow_copy_class(fid("vendor", "Niagara_bib"));
    s.apply(RenameFrame{FrameKind::Class, fid("vendor", "GlobalOntology"), "seller"});
    EXPECT_EQ(s.merged().find_slot("email")->domain, ClassSet{"seller"});
    EXPECT_EQ(s.image(FrameKind::Class, fid("vendor", "Niagara_bib")), "seller");
    EXPECT_TRUE(validate(s.merged()).empty());
}

TEST(Edits, RemoveScrubsReferences)
{
    auto s = bibliography_session();
    s.shallow_copy_class(fid("vendor", "Niagara_bib"));
    s.shallow_copy_class(fid("book", "Niagara_bib"));
    s.apply(RemoveFrame{FrameKind::Class, fid("book", "GlobalOntology")});
    EXPECT_EQ(s.merged().find_class("book"), nullptr);
    EXPECT_FALSE(s.image(FrameKind::Class, fid("book", "Niagara_bib")));
    EXPECT_TRUE(validate(s.merged()).empty());
}

TEST(Edits, SwapNames)
{
    auto s = bibliography_session();
    s.shallow_copy_class(fid("author", "Ruby_bibliography"));
    s.shallow_copy_class(fid("author", "Niagara_bib"));
    s.apply(SwapNames{FrameKind::Class, fid("author", "GlobalOntology"), fid("author_Niagara_bib", "GlobalOntology")});
    EXPECT_EQ(s.image(FrameKind::Class, fid("author", "Niagara_bib")), "author");
    EXPECT_EQ(s.image(FrameKind::Class, fid("author", "Ruby_bibliography")), "author_Niagara_bib");
    EXPECT_TRUE(validate(s.merged()).empty());
}

TEST(Edits, SetRangeAndCardinality)
{
    auto s = bibliography_session();
    s.shallow_copy_class(fid("vendor", "Niagara_bib"));
    s.apply(SetSlotRange{fid("phone", "GlobalOntology"), XsdKind::String});
    EXPECT_EQ(s.merged().find_slot("phone")->range_kind(), XsdKind::String);
    EXPECT_EQ(code_of([&] { s.apply(SetSlotRange{fid("phone", "GlobalOntology"), ClassSet{"vendor"}}); }),
              ErrorCode::KindMismatch);
    s.apply(SetCardinality{fid("phone", "GlobalOntology"), Cardinality{0, std::nullopt}});
    EXPECT_EQ(s.merged().find_slot("phone")->card, (Cardinality{0, std::nullopt}));
    EXPECT_THROW(s.apply(SetCardinality{fid("phone", "GlobalOntology"), Cardinality{2, 1u}}), Error);
}

TEST(Edits, SetPreferredNeedsKnownSource)
{
    auto s = bibliography_session();
    EXPECT_THROW(s.apply(SetPreferred{"Nope"}), Error);
    s.apply(SetPreferred{"Niagara_bib"});
    EXPECT_EQ(s.preferred(), "Niagara_bib");
    s.apply(SetPreferred{std::nullopt});
    EXPECT_FALSE(s.preferred());
}

TEST(Atomicity, FailedOperationLeavesNoTrace)
{
    auto s = bibliography_session();
    s.merge_classes(fid("author", "Ruby_bibliography"), fid("author", "Niagara_bib"));
    auto before = write_canonical(s.merged());
    auto log_size = s.log().size();
    EXPECT_THROW(s.merge_classes(fid("bibliography", "Ruby_bibliography"), fid("bib", "Niagara_bib"), "author"), Error);
    EXPECT_EQ(write_canonical(s.merged()), before);
    EXPECT_EQ(s.log().size(), log_size);
}

TEST(Undo, RestoresPreviousState)
{
    auto s = bibliography_session();
    EXPECT_EQ(code_of([&] { s.undo(); }), ErrorCode::EmptyLog);
    auto empty = write_canonical(s.merged());
    s.merge_classes(fid("author", "Ruby_bibliography"), fid("author", "Niagara_bib"));
    auto one = write_canonical(s.merged());
    s.shallow_copy_class(fid("book", "Niagara_bib"));
    s.undo();
    EXPECT_EQ(write_canonical(s.merged()), one);
    s.undo();
    EXPECT_EQ(write_canonical(s.merged()), empty);
    EXPECT_TRUE(s.image_map(FrameKind::Class).empty());
}

TEST(Record, ReportsCreatedAndTouched)
{
    auto s = bibliography_session();
    auto r = s.apply(MergeClasses{fid("author", "Ruby_bibliography"), fid("author", "Niagara_bib"), std::nullopt});
    ASSERT_TRUE(r.result);
    EXPECT_EQ(*r.result, fid("author", "GlobalOntology"));
    EXPECT_NE(std::find(r.created.begin(), r.created.end(), fid("author", "GlobalOntology")), r.created.end());
    EXPECT_TRUE(r.touched.contains(fid("author", "Ruby_bibliography")));
    EXPECT_TRUE(r.touched.contains(fid("author", "Niagara_bib")));
}
