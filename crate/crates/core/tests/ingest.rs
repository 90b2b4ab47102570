mod common;

use tesex::ingest::{load_project, ActionKind, Acc, Callee, Level, StmtKindTag, VarRef};

use common::{fixture, load, method};

#[test]
fn commons_email_model_shape() {
    let model = load("commons_email");
    let names: Vec<&str> = model.classes.iter().map(|c| c.qualified_name.as_str()).collect();
    assert_eq!(names, ["org.apache.commons.mail.Email", "org.apache.commons.mail.EmailTest"]);
    let email = model.class_by_name("org.apache.commons.mail.Email").unwrap();
    assert!(model.class(email).methods.len() >= 7);
    assert!(model.class(model.class_by_name("org.apache.commons.mail.EmailTest").unwrap()).in_test_root);
    let t = method(&model, "org.apache.commons.mail.EmailTest", "testFoldingHeaders");
    assert!(model.source_of(t).contains("public void testFoldingHeaders"));
}

#[test]
fn syntax_error_file_is_skipped_with_one_diagnostic() {
    let model = load("syntax_error");
    // independent count: every .java file that is not the broken one
    let root = fixture("syntax_error");
    let total = walkdir_count(&root);
    assert_eq!(total, 4);
    assert_eq!(model.classes.len(), total - 1);
    let errors: Vec<_> = model.diagnostics.iter().filter(|d| d.level == Level::Error).collect();
    assert_eq!(errors.len(), 1);
    assert!(errors[0].file.ends_with("Broken.java"));
    assert!(errors[0].to_string().starts_with("ERROR "));
}

fn walkdir_count(root: &std::path::Path) -> usize {
    fn rec(p: &std::path::Path) -> usize {
        std::fs::read_dir(p)
            .unwrap()
            .map(|e| e.unwrap().path())
            .map(|p| if p.is_dir() { rec(&p) } else { usize::from(p.extension().is_some_and(|x| x == "java")) })
            .sum()
    }
    rec(root)
}

#[test]
fn missing_source_root_is_an_error() {
    let root = fixture("does_not_exist");
    assert!(load_project(&root.join("src"), &root.join("test")).is_err());
}

#[test]
fn empty_source_root_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = load_project(dir.path(), &dir.path().join("t")).unwrap_err();
    assert!(matches!(err, tesex::ingest::IngestError::EmptyProject(_)));
}

#[test]
fn system_classes_are_exactly_those_under_the_roots() {
    let model = load("corpus");
    for c in &model.classes {
        assert!(c.is_system);
        let path = &model.files[c.file].path;
        assert!(path.starts_with(&model.source_root) || path.starts_with(&model.test_root));
    }
    assert!(!model.is_system("java.util.Map"));
    assert!(!model.is_system("javax.mail.internet.MimeMessage"));
}

#[test]
fn folding_headers_lowering_binds_calls_and_fields() {
    let model = load("corpus");
    let t = method(&model, "org.apache.commons.mail.EmailTest", "testFoldingHeaders");
    let mm = model.method(t);
    let labels: Vec<String> = mm.actions.iter().filter(|a| a.kind == ActionKind::Invocation && a.callee.is_system()).map(|a| a.label()).collect();
    assert_eq!(
        labels,
        [
            "Email.setHostName",
            "EmailTest.getMailServerPort",
            "Email.setSmtpPort",
            "Email.setFrom",
            "Email.addTo",
            "Email.setSubject",
            "Email.addHeader",
            "Email.getHeaders",
            "Email.getHeaders",
            "Email.buildMimeMessage",
            "Email.getMimeMessage",
        ]
    );
    // strTestMailServer is read as a field of the test class
    assert!(mm.actions.iter().any(|a| a.kind == ActionKind::FieldAccess && a.name == "strTestMailServer"));
    let kinds: Vec<StmtKindTag> = mm.body.iter().map(|s| s.kind).collect();
    assert_eq!(kinds.iter().filter(|k| **k == StmtKindTag::Assert).count(), 5);
    assert_eq!(mm.body.len(), 17);
}

#[test]
fn declaration_assigns_call_result() {
    let model = load("corpus");
    let t = method(&model, "org.apache.commons.mail.EmailTest", "testFoldingHeaders");
    let mm = model.method(t);
    let get = mm.actions.iter().find(|a| a.name == "getMimeMessage").unwrap();
    let Some(VarRef::Local(_, idx)) = get.assigned_to else { panic!("not assigned") };
    assert_eq!(mm.locals[idx].name, "msg");
    assert!(get.declares);
    assert!(matches!(get.value_root, Some(VarRef::Field(_))));
}

#[test]
fn field_writes_through_index_and_length_reads() {
    let model = load("corpus");
    let erase = method(&model, "com.google.common.collect.ArrayTable", "eraseAll");
    let acts = &model.method(erase).actions;
    assert!(acts.iter().any(|a| a.kind == ActionKind::FieldAccess && a.name == "array" && a.access == Some(Acc::W)));
    let size = method(&model, "org.jgap.Chromosome", "size");
    let acts = &model.method(size).actions;
    assert!(acts.iter().any(|a| a.kind == ActionKind::FieldAccess && a.name == "genes" && a.access == Some(Acc::R)));
}

#[test]
fn interface_calls_bind_to_the_unique_implementor() {
    let model = load("corpus");
    let t = method(&model, "org.puremvc.ControllerTest", "testHasCommand");
    let acts = &model.method(t).actions;
    let reg = acts.iter().find(|a| a.name == "registerCommand").unwrap();
    let Callee::System(m) = reg.callee else { panic!("unbound") };
    assert_eq!(model.method_ref(m), "org.puremvc.Controller#registerCommand(String,ICommand)");
    assert_eq!(reg.label(), "IController.registerCommand");
    let ctor = model.method(model.find_method("org.puremvc.Controller", "executeCommand").unwrap());
    let exec = ctor.actions.iter().find(|a| a.name == "execute").unwrap();
    assert!(matches!(exec.callee, Callee::System(_)));
}

#[test]
fn this_call_in_constructor_binds() {
    let model = load("corpus");
    let c = model.class_by_name("org.jgap.Chromosome").unwrap();
    let four = model.class(c).methods.iter().copied().find(|m| model.method(*m).is_constructor && model.method(*m).param_types.len() == 4).unwrap();
    let a = &model.method(four).actions[0];
    assert_eq!(a.name, "<init>");
    let Callee::System(m) = a.callee else { panic!("unbound") };
    assert_eq!(model.method(m).param_types.len(), 3);
}

#[test]
fn synthetic_default_constructor() {
    let model = load("corpus");
    let c = model.class_by_name("org.joda.time.MockPartial").unwrap();
    let ctors: Vec<_> = model.class(c).methods.iter().filter(|m| model.method(**m).is_constructor).collect();
    assert_eq!(ctors.len(), 1);
    assert!(model.method(*ctors[0]).synthetic);
    assert!(model.method(*ctors[0]).actions.is_empty());
}

#[test]
fn corpus_parses_without_errors() {
    let model = load("corpus");
    let errors: Vec<String> = model.diagnostics.iter().filter(|d| d.level == Level::Error).map(|d| d.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}
