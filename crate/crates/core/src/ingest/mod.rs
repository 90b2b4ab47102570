//! Parsing a Java source tree into the project IR.

mod lower;
pub mod model;
pub mod resolve;

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use walkdir::WalkDir;

use crate::java::ast::{TypeKind, TypeRef};
use crate::java::parser::parse_compilation_unit;

pub use lower::{is_assert_name, ASSERT_NAMES};
pub use model::*;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("no .java files under {0}")]
    EmptyProject(PathBuf),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn java_files(root: &Path) -> Result<Vec<PathBuf>, IngestError> {
    let mut out = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| IngestError::Io {
            path: e.path().map(Path::to_path_buf).unwrap_or_else(|| root.to_path_buf()),
            source: e.into_io_error().unwrap_or_else(|| std::io::Error::other("walk error")),
        })?;
        if entry.file_type().is_file() && entry.path().extension().is_some_and(|x| x == "java") {
            out.push(entry.into_path());
        }
    }
    Ok(out)
}

/// Parses every `.java` file under the two roots. Method bodies are kept as
/// syntax; [`resolve_types`] lowers them to statements and actions.
pub fn parse_project(source_root: &Path, test_root: &Path) -> Result<ProjectModel, IngestError> {
    if !source_root.is_dir() {
        return Err(IngestError::Io {
            path: source_root.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
        });
    }
    let main_files = java_files(source_root)?;
    if main_files.is_empty() {
        return Err(IngestError::EmptyProject(source_root.to_path_buf()));
    }
    let test_files = if test_root.is_dir() { java_files(test_root)? } else { Vec::new() };

    let mut model = ProjectModel {
        source_root: source_root.to_path_buf(),
        test_root: test_root.to_path_buf(),
        ..Default::default()
    };
    if !test_root.is_dir() {
        model.diagnostics.push(Diagnostic {
            level: Level::Warn,
            file: test_root.to_path_buf(),
            line: 0,
            message: "test root does not exist; no tests will be analyzed".into(),
        });
    }

    // A file under both roots (nested roots) belongs to the test side.
    let mut seen = HashMap::new();
    let mut ordered = Vec::new();
    for p in main_files {
        let in_test = p.starts_with(test_root);
        seen.insert(p.clone(), ordered.len());
        ordered.push((p, in_test));
    }
    for p in test_files {
        if let Some(&i) = seen.get(&p) {
            ordered[i].1 = true;
        } else {
            ordered.push((p, true));
        }
    }

    let mut units = Vec::new();
    for (path, in_test) in ordered {
        let text = std::fs::read_to_string(&path).map_err(|e| IngestError::Io { path: path.clone(), source: e })?;
        match parse_compilation_unit(&text) {
            Ok(parsed) => {
                for n in parsed.notes {
                    model.diagnostics.push(Diagnostic { level: Level::Warn, file: path.clone(), line: n.line, message: n.message });
                }
                let file = model.files.len();
                model.files.push(SourceFile { path, text, in_test_root: in_test });
                units.push((file, parsed.unit));
            }
            Err(e) => {
                model.diagnostics.push(Diagnostic {
                    level: Level::Error,
                    file: path,
                    line: e.line,
                    message: format!("skipped file: {}", e.message),
                });
            }
        }
    }

    // classes first so that type names can be resolved across files
    let mut decls = Vec::new();
    for (file, unit) in units {
        for td in unit.types {
            let qualified = match &unit.package {
                Some(p) => format!("{p}.{}", td.name),
                None => td.name.clone(),
            };
            if model.by_name.contains_key(&qualified) {
                model.diagnostics.push(Diagnostic {
                    level: Level::Warn,
                    file: model.files[file].path.clone(),
                    line: td.span.start_line,
                    message: format!("duplicate class {qualified} ignored"),
                });
                continue;
            }
            let id = ClassId(model.classes.len());
            model.by_name.insert(qualified.clone(), id);
            model.classes.push(ClassModel {
                id,
                qualified_name: qualified,
                simple_name: td.name.clone(),
                package: unit.package.clone(),
                is_interface: td.kind == TypeKind::Interface,
                is_abstract: td.modifiers.is_abstract,
                fields: Vec::new(),
                methods: Vec::new(),
                superclass: None,
                interfaces: Vec::new(),
                is_system: true,
                in_test_root: model.files[file].in_test_root,
                file,
                imports: unit.imports.clone(),
            });
            decls.push((id, td));
        }
    }

    for (id, td) in decls {
        let qualify = |model: &ProjectModel, t: &TypeRef| resolve::resolve_type(model, id, t);
        let (sup, ifaces) = if td.kind == TypeKind::Interface {
            (None, td.extends.iter().map(|t| qualify(&model, t).name).collect())
        } else {
            (td.extends.first().map(|t| qualify(&model, t).name), td.implements.iter().map(|t| qualify(&model, t).name).collect())
        };
        model.classes[id.0].superclass = sup;
        model.classes[id.0].interfaces = ifaces;

        for f in td.fields {
            if model.classes[id.0].fields.iter().any(|x| model.fields[x.0].name == f.name) {
                continue;
            }
            let fid = FieldId(model.fields.len());
            let ty = qualify(&model, &f.ty);
            model.fields.push(FieldModel {
                id: fid,
                owner: id,
                name: f.name,
                ty,
                is_static: f.modifiers.is_static || td.kind == TypeKind::Interface,
                init: f.init,
            });
            model.classes[id.0].fields.push(fid);
        }
        let has_ctor = td.methods.iter().any(|m| m.is_constructor);
        for m in td.methods {
            let mid = MethodId(model.methods.len());
            let param_types: Vec<TypeRef> = m.params.iter().map(|p| qualify(&model, &p.ty)).collect();
            let locals = m
                .params
                .iter()
                .zip(&param_types)
                .map(|(p, t)| LocalVar { name: p.name.clone(), ty: t.clone(), is_param: true })
                .collect();
            model.methods.push(MethodModel {
                id: mid,
                owner: id,
                name: m.name,
                varargs: m.params.last().is_some_and(|p| p.varargs),
                param_types,
                ret: m.ret.as_ref().map(|t| qualify(&model, t)),
                is_static: m.modifiers.is_static,
                is_public: m.modifiers.is_public || td.kind == TypeKind::Interface,
                is_abstract: m.body.is_none(),
                is_constructor: m.is_constructor,
                synthetic: false,
                annotations: m.modifiers.annotations,
                span: m.span,
                ast: m.body,
                locals,
                body: Vec::new(),
                actions: Vec::new(),
            });
            model.classes[id.0].methods.push(mid);
        }
        if td.kind == TypeKind::Class && !has_ctor {
            let mid = MethodId(model.methods.len());
            model.methods.push(MethodModel {
                id: mid,
                owner: id,
                name: "<init>".into(),
                param_types: Vec::new(),
                varargs: false,
                ret: None,
                is_static: false,
                is_public: true,
                is_abstract: false,
                is_constructor: true,
                synthetic: true,
                annotations: Vec::new(),
                span: td.span,
                ast: Some(crate::java::ast::Block { stmts: Vec::new(), span: td.span }),
                locals: Vec::new(),
                body: Vec::new(),
                actions: Vec::new(),
            });
            model.classes[id.0].methods.push(mid);
        }
    }
    Ok(model)
}

/// Lowers every method body to statements and actions, binding each call to
/// a project method where the receiver's static type (or its unique concrete
/// implementor) determines it. Calls that cannot be bound stay external.
pub fn resolve_types(mut model: ProjectModel) -> ProjectModel {
    let mut lowered = Vec::with_capacity(model.methods.len());
    let mut diags = Vec::new();
    for m in 0..model.methods.len() {
        let out = lower::lower_method(&model, MethodId(m));
        diags.extend(out.diagnostics.iter().cloned());
        lowered.push(out);
    }
    for (m, out) in lowered.into_iter().enumerate() {
        let mm = &mut model.methods[m];
        mm.locals = out.locals;
        mm.body = out.body;
        mm.actions = out.actions;
    }
    model.diagnostics.extend(diags);
    model.resolved = true;
    model
}

/// `parse_project` followed by `resolve_types`.
pub fn load_project(source_root: &Path, test_root: &Path) -> Result<ProjectModel, IngestError> {
    Ok(resolve_types(parse_project(source_root, test_root)?))
}
