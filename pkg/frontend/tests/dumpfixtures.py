import numpy as np

CSV_HEADER = ("case,method,dim,n_h,K,J_final,misfit_term,reg_term,"
              "iterations,stop_reason,wall_time_seconds,projected_gradient_norm")


def bench_csv_text(rows):
    lines = [CSV_HEADER]
    for case, method, n_h, K, J, t in rows:
        lines.append(f"{case},{method},1,{n_h},{K},{J:.9e},{J/2:.9e},{J/2:.9e},"
                     f"12,objective_stagnation,{t:.9e},1.0e-07")
    return "\n".join(lines) + "\n"


def write_dump(dirpath, K=3, n=5, dim=1, method="space-time"):
    dirpath.mkdir(parents=True, exist_ok=True)
    x = np.linspace(0.0, 1.0, n)
    (dirpath / "manifest.txt").write_text(
        f"case = case2\nmethod = {method}\ndim = {dim}\n"
        f"axis_nodes = {n}\nn_h = {n}\nK = {K}\ndt = {1.0/K:.9e}\nT = 1.0\n")
    hist = ["iteration,objective,misfit,regularization,step_size"]
    for it in range(4):
        hist.append(f"{it},{1.0/(it+1):.9e},{0.5/(it+1):.9e},{0.5/(it+1):.9e},1.0e+00")
    (dirpath / "history.csv").write_text("\n".join(hist) + "\n")
    for ell in range(K):
        body = "\n".join(f"{xi:.9e} {np.sin(3 * xi) * (ell + 1):.9e}" for xi in x)
        (dirpath / f"control_k{ell:04d}.txt").write_text(body + "\n")
        (dirpath / f"adjoint_k{ell:04d}.txt").write_text(body + "\n")
    for k in range(K + 1):
        body = "\n".join(f"{xi:.9e} {np.cos(2 * xi) * k:.9e}" for xi in x)
        (dirpath / f"state_k{k:04d}.txt").write_text(body + "\n")
    return dirpath
